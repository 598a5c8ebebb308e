/** SVG rasterization via resvg with the bundled font only, so PNG bytes
 * do not depend on whatever fonts the host happens to have. */

import { join } from "path";

import { Resvg } from "@resvg/resvg-js";

const FONT_DIR = join(__dirname, "..", "fonts");

export function svgToPng(svg: string, width = 1280): Buffer {
  const resvg = new Resvg(svg, {
    background: "white",
    fitTo: { mode: "width", value: width },
    font: {
      loadSystemFonts: false,
      fontFiles: [join(FONT_DIR, "DejaVuSans.ttf"), join(FONT_DIR, "DejaVuSans-Bold.ttf")],
      defaultFontFamily: "DejaVu Sans",
    },
  });
  return Buffer.from(resvg.render().asPng());
}

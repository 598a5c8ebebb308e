import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { loadManifest } from "../src/manifest";
import { buildPlotSvg, renderSpecFile } from "../src/render";
import { PlotsFile, SchemaError, plotsFileSchema } from "../src/schema";

const ROOT = join(__dirname, "..");
const GOLDEN = join(ROOT, "golden");

function shippedSpec(): PlotsFile {
  return plotsFileSchema.parse(JSON.parse(readFileSync(join(ROOT, "plots.json"), "utf-8")));
}

describe("buildPlotSvg", () => {
  it("renders every shipped figure type without error", () => {
    for (const plot of shippedSpec().plots) {
      const svg = buildPlotSvg(plot, ROOT);
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    }
  });

  it("footers carry the manifest config hash", () => {
    const spec = shippedSpec();
    const single = spec.plots[0];
    const hash = loadManifest(join(GOLDEN, "scaling_ising_u1.manifest.json")).config_hash;
    expect(buildPlotSvg(single, ROOT)).toContain(`config ${hash}`);
  });

  it("overlay footer lists each distinct manifest hash", () => {
    const spec = shippedSpec();
    const overlay = spec.plots[2];
    const h1 = loadManifest(join(GOLDEN, "scaling_ising_u1.manifest.json")).config_hash;
    const h2 = loadManifest(join(GOLDEN, "scaling_xxz_u3-nested.manifest.json")).config_hash;
    const svg = buildPlotSvg(overlay, ROOT);
    expect(svg).toContain(`config ${h1} | ${h2}`);
  });

  it("per-curve manifests drive per-curve fit legends", () => {
    const overlay = shippedSpec().plots[2];
    const svg = buildPlotSvg(overlay, ROOT);
    const nu1 = loadManifest(join(GOLDEN, "scaling_ising_u1.manifest.json")).fits![0].nu!;
    const nu2 = loadManifest(join(GOLDEN, "scaling_xxz_u3-nested.manifest.json")).fits![0].nu!;
    expect(svg).toContain(`ising u1 (ν = ${nu1.toFixed(2)})`);
    expect(svg).toContain(`xxz u3-nested (ν = ${nu2.toFixed(2)})`);
  });
});

describe("renderSpecFile", () => {
  function specInTmp(spec: unknown): string {
    const dir = mkdtempSync(join(tmpdir(), "plots-render-"));
    const path = join(dir, "plots.json");
    writeFileSync(path, JSON.stringify(spec), "utf-8");
    return path;
  }

  it("writes an SVG and a PNG per plot", () => {
    const path = specInTmp({
      plots: [
        {
          kind: "loglog_scaling",
          manifest: join(GOLDEN, "scaling_ising_u1.manifest.json"),
          curves: [{ csv: join(GOLDEN, "scaling_ising_u1.csv"), label: "u1" }],
          output: "figs/u1",
        },
      ],
    });
    const result = renderSpecFile(path, 640);
    expect(result.written).toHaveLength(2);
    const [svgPath, pngPath] = result.written;
    expect(svgPath.endsWith("figs/u1.svg")).toBe(true);
    expect(pngPath.endsWith("figs/u1.png")).toBe(true);
    expect(existsSync(svgPath)).toBe(true);
    const png = readFileSync(pngPath);
    expect(png.subarray(0, 8).toString("hex")).toBe("89504e470d0a1a0a");
  });

  it("renders byte-identically across runs", () => {
    const spec = {
      plots: [
        {
          kind: "fidelity_time",
          manifest: join(GOLDEN, "fidelity_xxz_l1_pf.manifest.json"),
          curves: [{ csv: join(GOLDEN, "fidelity_xxz_l1_pf_M40.csv"), label: "M = 40" }],
          output: "figs/f",
        },
      ],
    };
    const first = renderSpecFile(specInTmp(spec), 640);
    const second = renderSpecFile(specInTmp(spec), 640);
    for (let i = 0; i < first.written.length; i += 1) {
      expect(readFileSync(first.written[i]).equals(readFileSync(second.written[i]))).toBe(true);
    }
  });

  it("rejects a spec that is not valid JSON", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-render-"));
    const path = join(dir, "broken.json");
    writeFileSync(path, "{not json", "utf-8");
    expect(() => renderSpecFile(path)).toThrow(SchemaError);
    expect(() => renderSpecFile(path)).toThrow(/not valid JSON/);
  });

  it("rejects a spec with a missing required field", () => {
    const path = specInTmp({ plots: [{ kind: "loglog_scaling", output: "x" }] });
    expect(() => renderSpecFile(path)).toThrow(SchemaError);
  });

  it("propagates CSV schema errors with the file named", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-render-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "", "utf-8");
    const path = specInTmp({
      plots: [
        {
          kind: "loglog_scaling",
          manifest: join(GOLDEN, "scaling_ising_u1.manifest.json"),
          curves: [{ csv: empty }],
          output: "figs/broken",
        },
      ],
    });
    expect(() => renderSpecFile(path)).toThrow(/empty\.csv: empty CSV/);
  });
});

#!/usr/bin/env node
/** Command-line entry: `render --spec plots.json`. */

import yargs from "yargs";

import { renderSpecFile } from "./render";
import { SchemaError } from "./schema";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("render --spec plots.json")
    .option("spec", {
      type: "string",
      demandOption: true,
      describe: "plot spec JSON listing figures to render",
    })
    .option("png-width", {
      type: "number",
      default: 1280,
      describe: "raster width in pixels",
    })
    .strict()
    .exitProcess(false)
    .parseSync();

  const result = renderSpecFile(args.spec, args["png-width"]);
  for (const path of result.written) console.log(`wrote ${path}`);
  return 0;
}

if (require.main === module) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error(String(err instanceof Error ? err.message : err));
    }
    process.exit(1);
  }
}

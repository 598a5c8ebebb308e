/** Run-manifest loading; fit lines and footer hashes come from here. */

import { readFileSync } from "fs";

import { z } from "zod";

import { Manifest, SchemaError, manifestSchema, schemaErrorFrom } from "./schema";

export function loadManifest(path: string): Manifest {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`${path}: ${(err as Error).message}`);
  }
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${path}: not valid JSON: ${(err as Error).message}`);
  }
  const result = manifestSchema.safeParse(obj);
  if (!result.success) {
    throw schemaErrorFrom(path, result.error as z.ZodError);
  }
  return result.data;
}

/**
 * CSV loading with fixed-schema validation.
 *
 * The renderer accepts exactly the column layouts the dacqc CLI writes;
 * a missing column is reported together with the full expected header so
 * the message doubles as documentation.
 */

import { readFileSync } from "fs";

import Papa from "papaparse";

import {
  FIDELITY_COLUMNS,
  FIDELITY_OPTIONAL_COLUMNS,
  SCALING_COLUMNS,
  SchemaError,
} from "./schema";

export interface Table {
  /** parsed numeric columns, keyed by header name */
  columns: Record<string, number[]>;
  rows: number;
}

function parseNumericCsv(path: string, required: readonly string[], optional: readonly string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`${path}: ${(err as Error).message}`);
  }
  if (text.trim() === "") {
    throw new SchemaError(`${path}: empty CSV; expected header ${required.join(",")}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: CSV parse error: ${first.message} (row ${first.row ?? "?"})`);
  }
  const header = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column(s) ${missing.join(", ")}; expected header ${required.join(",")}`
    );
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows; expected header ${required.join(",")}`);
  }

  const wanted = [...required, ...optional.filter((c) => header.includes(c))];
  const columns: Record<string, number[]> = {};
  for (const name of wanted) columns[name] = [];
  parsed.data.forEach((row, i) => {
    for (const name of wanted) {
      const value = Number(row[name]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`${path}: row ${i + 1}, column ${name}: not a finite number (${row[name]!})`);
      }
      columns[name].push(value);
    }
  });
  return { columns, rows: parsed.data.length };
}

/** Step-error sweep: dt, error, and the two fit-window membership flags. */
export function loadScalingCsv(path: string): Table {
  return parseNumericCsv(path, SCALING_COLUMNS, []);
}

/** Time-series run: step, t, lambda, fidelity, magnetization (+ sampled column). */
export function loadFidelityCsv(path: string): Table {
  return parseNumericCsv(path, FIDELITY_COLUMNS, FIDELITY_OPTIONAL_COLUMNS);
}

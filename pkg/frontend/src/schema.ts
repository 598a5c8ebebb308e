/**
 * Input contracts for the renderer.
 *
 * Everything this tool consumes is produced by the dacqc CLI: scaling
 * and fidelity CSVs plus their run manifests. The schemas here pin those
 * file shapes; rendering never recomputes physics, it only draws what
 * the files say.
 */

import { z } from "zod";

/** Raised for any malformed input file; the CLI maps it to exit 1. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export const PLOT_KINDS = ["loglog_scaling", "fidelity_time"] as const;
export type PlotKind = (typeof PLOT_KINDS)[number];

// column sets written by the dacqc CLI, in header order
export const SCALING_COLUMNS = ["dt", "error", "in_window", "in_effective_window"] as const;
export const FIDELITY_COLUMNS = ["step", "t", "lambda", "fidelity", "magnetization"] as const;
export const FIDELITY_OPTIONAL_COLUMNS = ["fidelity_shots"] as const;

const curveSchema = z.object({
  csv: z.string().min(1),
  label: z.string().optional(),
  // overrides the plot-level manifest for this curve's fit line
  manifest: z.string().optional(),
});

const plotSchema = z.object({
  kind: z.enum(PLOT_KINDS),
  title: z.string().optional(),
  x_label: z.string().optional(),
  y_label: z.string().optional(),
  curves: z.array(curveSchema).min(1),
  reference: curveSchema.optional(),
  manifest: z.string().min(1),
  output: z.string().min(1),
});

export const plotsFileSchema = z.object({
  plots: z.array(plotSchema).min(1),
});

export type CurveSpec = z.infer<typeof curveSchema>;
export type PlotSpec = z.infer<typeof plotSchema>;
export type PlotsFile = z.infer<typeof plotsFileSchema>;

// fit entries as written by the run manifest; numbers may be null when
// no window qualified
const fitSummarySchema = z.looseObject({
  decomposition: z.string().optional(),
  model: z.string().optional(),
  lambda: z.number().optional(),
  exact: z.boolean(),
  nu: z.number().nullable().optional(),
  b: z.number().nullable().optional(),
  window_dt: z.tuple([z.number(), z.number()]).optional(),
  breakdown_dt: z.number().nullable().optional(),
  nu_effective: z.number().nullable().optional(),
  b_effective: z.number().nullable().optional(),
  effective_window_dt: z.tuple([z.number(), z.number()]).optional(),
});

export const manifestSchema = z.looseObject({
  experiment: z.string(),
  config: z.record(z.string(), z.unknown()),
  config_hash: z.string().regex(/^[0-9a-f]{64}$/),
  seed: z.number(),
  versions: z.record(z.string(), z.string()),
  fits: z.array(fitSummarySchema).optional(),
  artifacts: z.record(z.string(), z.string()).optional(),
});

export type FitSummary = z.infer<typeof fitSummarySchema>;
export type Manifest = z.infer<typeof manifestSchema>;

/** Flatten a zod failure into one readable SchemaError. */
export function schemaErrorFrom(source: string, err: z.ZodError): SchemaError {
  const issues = err.issues
    .map((i) => (i.path.length ? `${i.path.join(".")}: ${i.message}` : i.message))
    .join("; ");
  return new SchemaError(`${source}: ${issues}`);
}

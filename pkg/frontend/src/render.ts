/**
 * Orchestrates one render pass: read the plot spec, load the referenced
 * CSV and manifest artifacts, build each figure, write SVG and PNG.
 *
 * This stage only plumbs files into the chart builders; every number on
 * a figure (points, fit lines, legend exponents, footer hash) is read
 * from the artifacts, never recomputed.
 */

import { mkdirSync, readFileSync, writeFileSync } from "fs";
import { basename, dirname, isAbsolute, join } from "path";

import { z } from "zod";

import { LoglogCurve, TimeCurve, buildFidelityChart, buildLoglogChart, fitLegend } from "./chart";
import { loadFidelityCsv, loadScalingCsv } from "./csv";
import { loadManifest } from "./manifest";
import {
  CurveSpec,
  FitSummary,
  Manifest,
  PlotSpec,
  SchemaError,
  plotsFileSchema,
  schemaErrorFrom,
} from "./schema";

function resolveFrom(baseDir: string, p: string): string {
  return isAbsolute(p) ? p : join(baseDir, p);
}

function defaultLabel(curve: CurveSpec): string {
  return curve.label ?? basename(curve.csv).replace(/\.csv$/, "");
}

interface LoadedManifests {
  plotManifest: Manifest;
  byCurve: Map<CurveSpec, Manifest>;
  hashes: string[];
}

function loadManifests(plot: PlotSpec, baseDir: string): LoadedManifests {
  const plotManifest = loadManifest(resolveFrom(baseDir, plot.manifest));
  const byCurve = new Map<CurveSpec, Manifest>();
  const hashes = [plotManifest.config_hash];
  for (const curve of plot.curves) {
    if (curve.manifest) {
      const m = loadManifest(resolveFrom(baseDir, curve.manifest));
      byCurve.set(curve, m);
      if (!hashes.includes(m.config_hash)) hashes.push(m.config_hash);
    }
  }
  return { plotManifest, byCurve, hashes };
}

function fitFor(curve: CurveSpec, manifests: LoadedManifests): FitSummary | undefined {
  const manifest = manifests.byCurve.get(curve) ?? manifests.plotManifest;
  return manifest.fits?.[0];
}

/** Build the SVG for one plot entry; exported for direct testing. */
export function buildPlotSvg(plot: PlotSpec, baseDir: string): string {
  const manifests = loadManifests(plot, baseDir);
  const footer = `config ${manifests.hashes.join(" | ")}`;

  if (plot.kind === "loglog_scaling") {
    const curves: LoglogCurve[] = plot.curves.map((curve) => {
      const table = loadScalingCsv(resolveFrom(baseDir, curve.csv));
      const fit = fitFor(curve, manifests);
      return {
        label: curve.label ?? fit?.decomposition ?? defaultLabel(curve),
        dts: table.columns.dt,
        errors: table.columns.error,
        fit,
      };
    });
    return buildLoglogChart({
      title: plot.title,
      xLabel: plot.x_label,
      yLabel: plot.y_label,
      curves,
      footer,
    });
  }

  const curves: TimeCurve[] = plot.curves.map((curve) => {
    const table = loadFidelityCsv(resolveFrom(baseDir, curve.csv));
    return {
      label: defaultLabel(curve),
      ts: table.columns.t,
      values: table.columns.fidelity,
    };
  });
  let reference: TimeCurve | undefined;
  if (plot.reference) {
    const table = loadFidelityCsv(resolveFrom(baseDir, plot.reference.csv));
    reference = {
      label: plot.reference.label ?? "reference",
      ts: table.columns.t,
      values: table.columns.fidelity,
    };
  }
  return buildFidelityChart({
    title: plot.title,
    xLabel: plot.x_label,
    yLabel: plot.y_label,
    curves,
    reference,
    footer,
  });
}

export interface RenderResult {
  /** paths of every image written, in spec order (svg before png) */
  written: string[];
}

export function renderSpecFile(specPath: string, pngWidth = 1280): RenderResult {
  let text: string;
  try {
    text = readFileSync(specPath, "utf-8");
  } catch (err) {
    throw new SchemaError(`${specPath}: ${(err as Error).message}`);
  }
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${specPath}: not valid JSON: ${(err as Error).message}`);
  }
  const parsed = plotsFileSchema.safeParse(obj);
  if (!parsed.success) {
    throw schemaErrorFrom(specPath, parsed.error as z.ZodError);
  }

  // rasterizer is loaded lazily so schema-only use stays dependency-light
  const { svgToPng } = require("./png") as typeof import("./png");

  const baseDir = dirname(specPath);
  const written: string[] = [];
  for (const plot of parsed.data.plots) {
    const svg = buildPlotSvg(plot, baseDir);
    const stem = resolveFrom(baseDir, plot.output);
    mkdirSync(dirname(stem), { recursive: true });
    const svgPath = `${stem}.svg`;
    const pngPath = `${stem}.png`;
    writeFileSync(svgPath, svg, "utf-8");
    writeFileSync(pngPath, svgToPng(svg, pngWidth));
    written.push(svgPath, pngPath);
  }
  return { written };
}

export { fitLegend };

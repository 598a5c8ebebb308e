export { buildFidelityChart, buildLoglogChart, fitLegend } from "./chart";
export type { LoglogCurve, TimeCurve } from "./chart";
export { loadFidelityCsv, loadScalingCsv } from "./csv";
export { loadManifest } from "./manifest";
export { svgToPng } from "./png";
export { buildPlotSvg, renderSpecFile } from "./render";
export {
  FIDELITY_COLUMNS,
  PLOT_KINDS,
  SCALING_COLUMNS,
  SchemaError,
  manifestSchema,
  plotsFileSchema,
} from "./schema";
export type { FitSummary, Manifest, PlotSpec, PlotsFile } from "./schema";

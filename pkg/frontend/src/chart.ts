/**
 * Hand-rolled SVG chart builders.
 *
 * Two figure types: log-log step-error scaling with overlaid power-law
 * fit lines, and fidelity-vs-time curve families with a distinctly
 * styled reference. Output is a deterministic string: same inputs, same
 * bytes, so figures can be diffed in tests and across runs.
 */

import { FitSummary, SchemaError } from "./schema";

export interface LoglogCurve {
  label: string;
  dts: number[];
  errors: number[];
  fit?: FitSummary;
}

export interface TimeCurve {
  label: string;
  ts: number[];
  values: number[];
}

export interface LoglogChartOpts {
  title?: string;
  xLabel?: string;
  yLabel?: string;
  curves: LoglogCurve[];
  footer: string;
}

export interface FidelityChartOpts {
  title?: string;
  xLabel?: string;
  yLabel?: string;
  curves: TimeCurve[];
  reference?: TimeCurve;
  footer: string;
}

// shared layout
const W = 640;
const H = 440;
const ML = 64;
const MR = 18;
const MT = 40;
const MB = 64;
const PW = W - ML - MR;
const PH = H - MT - MB;

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
const REF_COLOR = "#222";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function fx(v: number): string {
  return v.toFixed(2);
}

/** Legend text for a fitted curve; numbers come verbatim from the manifest. */
export function fitLegend(label: string, fit: FitSummary | undefined): string {
  if (!fit) return label;
  if (fit.exact) return `${label} (exact)`;
  const parts: string[] = [];
  if (fit.nu != null) parts.push(`ν = ${fit.nu.toFixed(2)}`);
  if (fit.nu == null && fit.nu_effective != null) {
    parts.push(`ν_eff = ${fit.nu_effective.toFixed(2)}`);
  }
  return parts.length > 0 ? `${label} (${parts.join(", ")})` : label;
}

function linearTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) ticks.push(v);
  return ticks;
}

function decadeTicks(logMin: number, logMax: number): number[] {
  const ticks: number[] = [];
  for (let k = Math.ceil(logMin); k <= Math.floor(logMax) + 1e-9; k += 1) ticks.push(k);
  // wide ranges get thinned so labels stay readable
  const stride = Math.max(1, Math.ceil(ticks.length / 8));
  return ticks.filter((_, i) => i % stride === 0);
}

function fmtDecade(k: number): string {
  return `1e${k}`;
}

function fmtLinear(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.001) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
  marker?: boolean;
}

function svgHeader(title: string | undefined, subtitleCount: number): string {
  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="DejaVu Sans, Helvetica, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  if (title) {
    s += `<text x="${ML}" y="${MT - 16}" font-size="13" font-weight="bold" fill="#222">${esc(title)}</text>\n`;
  }
  void subtitleCount;
  return s;
}

function svgFooter(footer: string): string {
  return `<text x="${ML}" y="${H - 8}" font-size="7.5" fill="#999">${esc(footer)}</text>\n`;
}

function axesFrame(): string {
  let s = `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + PH}" stroke="#333" stroke-width="1"/>\n`;
  s += `<line x1="${ML}" y1="${MT + PH}" x2="${ML + PW}" y2="${MT + PH}" stroke="#333" stroke-width="1"/>\n`;
  return s;
}

function axisLabels(xLabel: string | undefined, yLabel: string | undefined): string {
  let s = "";
  if (xLabel) {
    s += `<text x="${ML + PW / 2}" y="${MT + PH + 34}" text-anchor="middle" font-size="11" fill="#333">${esc(xLabel)}</text>\n`;
  }
  if (yLabel) {
    const cy = MT + PH / 2;
    s += `<text x="16" y="${cy}" text-anchor="middle" font-size="11" fill="#333" transform="rotate(-90,16,${cy})">${esc(yLabel)}</text>\n`;
  }
  return s;
}

function legendBox(entries: LegendEntry[], anchor: "top-right" | "bottom-right"): string {
  if (entries.length === 0) return "";
  const boxW = Math.max(...entries.map((e) => e.label.length)) * 5.6 + 34;
  const boxH = entries.length * 13 + 8;
  const bx = ML + PW - boxW - 6;
  const by = anchor === "top-right" ? MT + 6 : MT + PH - boxH - 6;
  let s = `<rect x="${fx(bx)}" y="${fx(by)}" width="${fx(boxW)}" height="${fx(boxH)}" rx="3" fill="#fff" fill-opacity="0.88" stroke="#ddd" stroke-width="0.5"/>\n`;
  entries.forEach((e, i) => {
    const ly = by + 11 + i * 13;
    const dash = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
    s += `<line x1="${fx(bx + 6)}" y1="${fx(ly - 3)}" x2="${fx(bx + 24)}" y2="${fx(ly - 3)}" stroke="${e.color}" stroke-width="1.5"${dash}/>\n`;
    if (e.marker) {
      s += `<circle cx="${fx(bx + 15)}" cy="${fx(ly - 3)}" r="2.2" fill="${e.color}"/>\n`;
    }
    s += `<text x="${fx(bx + 28)}" y="${fx(ly)}" font-size="9" fill="#333">${esc(e.label)}</text>\n`;
  });
  return s;
}

/** Log-log scaling figure: data points plus manifest fit lines. */
export function buildLoglogChart(opts: LoglogChartOpts): string {
  const pts = opts.curves.flatMap((c) =>
    c.dts.map((dt, i) => ({ dt, error: c.errors[i] })).filter((p) => p.dt > 0 && p.error > 0)
  );
  if (pts.length === 0) {
    throw new SchemaError("log-log plot has no positive data points to draw");
  }
  const logX = (v: number) => Math.log10(v);
  let xMin = Math.min(...pts.map((p) => logX(p.dt)));
  let xMax = Math.max(...pts.map((p) => logX(p.dt)));
  let yMin = Math.min(...pts.map((p) => logX(p.error)));
  let yMax = Math.max(...pts.map((p) => logX(p.error)));
  if (xMax - xMin < 1e-9) {
    xMin -= 0.5;
    xMax += 0.5;
  }
  if (yMax - yMin < 1e-9) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const padX = (xMax - xMin) * 0.04;
  const padY = (yMax - yMin) * 0.06;
  xMin -= padX;
  xMax += padX;
  yMin -= padY;
  yMax += padY;
  const xOf = (v: number) => ML + ((logX(v) - xMin) / (xMax - xMin)) * PW;
  const yOf = (v: number) => MT + PH - ((logX(v) - yMin) / (yMax - yMin)) * PH;

  let s = svgHeader(opts.title, 0);

  // grid + ticks at decades
  for (const k of decadeTicks(yMin, yMax)) {
    const y = MT + PH - ((k - yMin) / (yMax - yMin)) * PH;
    s += `<line x1="${ML}" y1="${fx(y)}" x2="${ML + PW}" y2="${fx(y)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${fx(y + 3)}" text-anchor="end" font-size="9" fill="#555">${fmtDecade(k)}</text>\n`;
  }
  for (const k of decadeTicks(xMin, xMax)) {
    const x = ML + ((k - xMin) / (xMax - xMin)) * PW;
    s += `<line x1="${fx(x)}" y1="${MT}" x2="${fx(x)}" y2="${MT + PH}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${fx(x)}" y="${MT + PH + 14}" text-anchor="middle" font-size="9" fill="#555">${fmtDecade(k)}</text>\n`;
  }

  const legend: LegendEntry[] = [];
  opts.curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    for (let i = 0; i < curve.dts.length; i += 1) {
      const dt = curve.dts[i];
      const err = curve.errors[i];
      if (dt <= 0 || err <= 0) continue;
      s += `<circle cx="${fx(xOf(dt))}" cy="${fx(yOf(err))}" r="2.6" fill="${color}" fill-opacity="0.85"/>\n`;
    }
    legend.push({ label: fitLegend(curve.label, curve.fit), color, marker: true });

    const fit = curve.fit;
    if (!fit || fit.exact) return;
    // power law b*dt^nu is a straight segment in log-log space
    if (fit.nu != null && fit.b != null && fit.window_dt) {
      const [w0, w1] = fit.window_dt;
      const y0 = fit.b * Math.pow(w0, fit.nu);
      const y1 = fit.b * Math.pow(w1, fit.nu);
      s += `<line x1="${fx(xOf(w0))}" y1="${fx(yOf(y0))}" x2="${fx(xOf(w1))}" y2="${fx(yOf(y1))}" stroke="${color}" stroke-width="1.6"/>\n`;
    }
    if (fit.nu_effective != null && fit.b_effective != null && fit.effective_window_dt) {
      const [w0, w1] = fit.effective_window_dt;
      const y0 = fit.b_effective * Math.pow(w0, fit.nu_effective);
      const y1 = fit.b_effective * Math.pow(w1, fit.nu_effective);
      s += `<line x1="${fx(xOf(w0))}" y1="${fx(yOf(y0))}" x2="${fx(xOf(w1))}" y2="${fx(yOf(y1))}" stroke="${color}" stroke-width="1.3" stroke-dasharray="5,3"/>\n`;
      if (fit.nu != null) {
        legend.push({
          label: `${curve.label} (ν_eff = ${fit.nu_effective.toFixed(2)})`,
          color,
          dash: "5,3",
        });
      }
    }
    if (fit.breakdown_dt != null) {
      const x = xOf(fit.breakdown_dt);
      s += `<line x1="${fx(x)}" y1="${MT}" x2="${fx(x)}" y2="${MT + PH}" stroke="${color}" stroke-width="0.9" stroke-dasharray="2,3"/>\n`;
      s += `<text x="${fx(x + 3)}" y="${MT + 12}" font-size="8" fill="${color}">breakdown</text>\n`;
    }
  });

  s += axesFrame();
  s += axisLabels(opts.xLabel ?? "dt", opts.yLabel ?? "error");
  s += legendBox(legend, "bottom-right");
  s += svgFooter(opts.footer);
  s += "</svg>\n";
  return s;
}

/** Fidelity-vs-time figure: per-run curves plus a dashed reference. */
export function buildFidelityChart(opts: FidelityChartOpts): string {
  const all = [...opts.curves, ...(opts.reference ? [opts.reference] : [])];
  if (all.every((c) => c.ts.length === 0)) {
    throw new SchemaError("fidelity plot has no data points to draw");
  }
  const tMin = Math.min(...all.map((c) => Math.min(...c.ts)));
  const tMax = Math.max(...all.map((c) => Math.max(...c.ts)));
  const vMax = Math.max(1, ...all.map((c) => Math.max(...c.values)));
  const yMin = 0;
  const yMax = vMax * 1.04;
  const xOf = (t: number) => ML + ((t - tMin) / (tMax - tMin || 1)) * PW;
  const yOf = (v: number) => MT + PH - ((v - yMin) / (yMax - yMin)) * PH;

  let s = svgHeader(opts.title, 0);

  const yTicks = linearTicks(yMin, yMax, 5);
  for (const v of yTicks) {
    const y = yOf(v);
    s += `<line x1="${ML}" y1="${fx(y)}" x2="${ML + PW}" y2="${fx(y)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${fx(y + 3)}" text-anchor="end" font-size="9" fill="#555">${fmtLinear(v)}</text>\n`;
  }
  const xTicks = linearTicks(tMin, tMax, 6);
  for (const t of xTicks) {
    const x = xOf(t);
    s += `<line x1="${fx(x)}" y1="${MT + PH}" x2="${fx(x)}" y2="${MT + PH + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${fx(x)}" y="${MT + PH + 14}" text-anchor="middle" font-size="9" fill="#555">${fmtLinear(t)}</text>\n`;
  }

  const legend: LegendEntry[] = [];
  opts.curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const pts = curve.ts.map((t, i) => `${fx(xOf(t))},${fx(yOf(curve.values[i]))}`).join(" ");
    s += `<polyline fill="none" stroke="${color}" stroke-width="1.4" points="${pts}"/>\n`;
    legend.push({ label: curve.label, color });
  });
  if (opts.reference) {
    const r = opts.reference;
    const pts = r.ts.map((t, i) => `${fx(xOf(t))},${fx(yOf(r.values[i]))}`).join(" ");
    s += `<polyline fill="none" stroke="${REF_COLOR}" stroke-width="1.8" stroke-dasharray="7,4" points="${pts}"/>\n`;
    legend.push({ label: r.label, color: REF_COLOR, dash: "7,4" });
  }

  s += axesFrame();
  s += axisLabels(opts.xLabel ?? "t", opts.yLabel ?? "fidelity");
  s += legendBox(legend, "top-right");
  s += svgFooter(opts.footer);
  s += "</svg>\n";
  return s;
}

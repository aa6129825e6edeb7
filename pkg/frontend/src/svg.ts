/** Deterministic SVG rendering of plot models.
 *
 * The full-precision model is embedded in a <metadata> element (base64 JSON)
 * so the plotted series can be extracted and compared against the source CSV
 * without any parsing of coordinates back out of the drawing. */

import { CellSeries, Panel, PlotError, PlotModel, Series } from "./model.js";

const PANEL_W = 430;
const PANEL_H = 340;
const MARGIN = { top: 46, right: 18, bottom: 52, left: 64 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
const BUCKET_COLORS: Record<string, string> = {
  "<=10%": "#2166ac",
  "<=20%": "#67a9cf",
  "<=30%": "#d1e5f0",
  "<=40%": "#fddbc7",
  "<=50%": "#ef8a62",
  infeasible: "#67001f",
};

type ScaleKind = "linear" | "log";

interface Scale {
  (v: number): number;
  ticks: number[];
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step0;
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function makeScale(kind: ScaleKind, lo: number, hi: number, r0: number, r1: number): Scale {
  if (kind === "log") {
    if (lo <= 0) {
      throw new PlotError("log scale requires positive domain");
    }
    const l0 = Math.log10(lo);
    const l1 = Math.log10(hi);
    const f = ((v: number) => r0 + ((Math.log10(v) - l0) / (l1 - l0 || 1)) * (r1 - r0)) as Scale;
    const ticks: number[] = [];
    for (let d = Math.ceil(l0); d <= Math.floor(l1); d++) {
      ticks.push(Math.pow(10, d));
    }
    f.ticks = ticks.length ? ticks : [lo, hi];
    return f;
  }
  const f = ((v: number) => r0 + ((v - lo) / (hi - lo || 1)) * (r1 - r0)) as Scale;
  f.ticks = niceTicks(lo, hi);
  return f;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) {
    return v.toExponential(0).replace("+", "");
  }
  return String(Math.round(v * 1e6) / 1e6);
}

function dataExtent(panel: Panel): { x: [number, number]; y: [number, number] } {
  let xs: number[] = [];
  let ys: number[] = [];
  for (const s of panel.series) {
    if (s.kind === "line" || s.kind === "points") {
      const pts = panel.yScale === "log" ? s.points.filter((p) => p.y > 0) : s.points;
      xs = xs.concat(pts.map((p) => p.x));
      ys = ys.concat(pts.map((p) => p.y));
    } else if (s.kind === "cells") {
      xs = xs.concat(s.cells.map((c) => c.x));
      ys = ys.concat(s.cells.map((c) => c.y));
    } else {
      xs.push(s.x);
    }
  }
  if (!xs.length || (!ys.length && !panel.series.some((s) => s.kind === "cells"))) {
    throw new PlotError(`panel '${panel.title}' has nothing to draw`);
  }
  const pad = (v: [number, number]): [number, number] => (v[0] === v[1] ? [v[0] - 1, v[1] + 1] : v);
  return {
    x: pad([Math.min(...xs), Math.max(...xs)]),
    y: ys.length ? pad([Math.min(...ys), Math.max(...ys)]) : [0, 1],
  };
}

function logColor(value: number, lo: number, hi: number): string {
  const t = (Math.log10(value) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo) || 1);
  const c0 = [33, 102, 172];
  const c1 = [178, 24, 43];
  const mix = c0.map((a, i) => Math.round(a + (c1[i] - a) * Math.min(1, Math.max(0, t))));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

function renderCells(s: CellSeries, x0: number, y0: number, w: number, h: number): string {
  const xs = [...new Set(s.cells.map((c) => c.x))].sort((a, b) => a - b);
  const ys = [...new Set(s.cells.map((c) => c.y))].sort((a, b) => a - b);
  const cw = w / xs.length;
  const ch = h / ys.length;
  const numeric = s.cells.filter((c) => typeof c.value === "number").map((c) => c.value as number);
  const lo = numeric.length ? Math.min(...numeric) : 1;
  const hi = numeric.length ? Math.max(...numeric) : 1;
  const parts: string[] = [];
  for (const c of s.cells) {
    const xi = xs.indexOf(c.x);
    const yi = ys.indexOf(c.y);
    const color =
      s.coloring === "bucket"
        ? BUCKET_COLORS[String(c.value)] ?? "#999999"
        : logColor(c.value as number, lo, hi);
    const px = x0 + xi * cw;
    const py = y0 + h - (yi + 1) * ch;
    parts.push(
      `<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${cw.toFixed(2)}" ` +
        `height="${ch.toFixed(2)}" fill="${color}"><title>${esc(
          `${s.name}: x=${c.x} y=${c.y} value=${c.value}`,
        )}</title></rect>`,
    );
  }
  // axis tick labels at a subset of the categorical positions
  const step = Math.max(1, Math.ceil(xs.length / 6));
  for (let i = 0; i < xs.length; i += step) {
    const px = x0 + (i + 0.5) * cw;
    parts.push(
      `<text x="${px.toFixed(2)}" y="${(y0 + h + 16).toFixed(2)}" class="tick">${fmt(xs[i])}</text>`,
    );
  }
  const ystep = Math.max(1, Math.ceil(ys.length / 6));
  for (let i = 0; i < ys.length; i += ystep) {
    const py = y0 + h - (i + 0.5) * ch;
    parts.push(
      `<text x="${(x0 - 8).toFixed(2)}" y="${(py + 4).toFixed(2)}" class="tick" text-anchor="end">${fmt(
        ys[i],
      )}</text>`,
    );
  }
  return parts.join("\n");
}

function renderPanel(panel: Panel, offsetX: number): string {
  const x0 = offsetX + MARGIN.left;
  const y0 = MARGIN.top;
  const w = PANEL_W - MARGIN.left - MARGIN.right;
  const h = PANEL_H - MARGIN.top - MARGIN.bottom;
  const parts: string[] = [];
  parts.push(
    `<text x="${x0 + w / 2}" y="${y0 - 24}" class="title">${esc(panel.title)}</text>`,
  );
  const hasCells = panel.series.some((s) => s.kind === "cells");
  parts.push(`<rect x="${x0}" y="${y0}" width="${w}" height="${h}" class="frame"/>`);

  if (hasCells) {
    for (const s of panel.series) {
      if (s.kind === "cells") {
        parts.push(renderCells(s, x0, y0, w, h));
      }
    }
  } else {
    const ext = dataExtent(panel);
    const sx = makeScale(panel.xScale, ext.x[0], ext.x[1], x0, x0 + w);
    const sy = makeScale(panel.yScale, ext.y[0], ext.y[1], y0 + h, y0);
    for (const t of sx.ticks) {
      const px = sx(t);
      parts.push(`<line x1="${px}" y1="${y0 + h}" x2="${px}" y2="${y0 + h + 5}" class="axis"/>`);
      parts.push(`<text x="${px}" y="${y0 + h + 18}" class="tick">${fmt(t)}</text>`);
    }
    for (const t of sy.ticks) {
      const py = sy(t);
      parts.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" class="axis"/>`);
      parts.push(`<text x="${x0 - 8}" y="${py + 4}" class="tick" text-anchor="end">${fmt(t)}</text>`);
    }
    let color = 0;
    let legendY = y0 + 14;
    for (const s of panel.series) {
      if (s.kind === "vline") {
        const px = sx(s.x);
        parts.push(
          `<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + h}" ` +
            `class="vline"/>`,
        );
        parts.push(
          `<text x="${(px + 4).toFixed(2)}" y="${y0 + 12}" class="note">${esc(s.name)}</text>`,
        );
        continue;
      }
      const c = PALETTE[color % PALETTE.length];
      color += 1;
      if (s.kind === "line") {
        const pts = panel.yScale === "log" ? s.points.filter((p) => p.y > 0) : s.points;
        const d = pts.map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`).join(" ");
        parts.push(`<polyline points="${d}" fill="none" stroke="${c}" stroke-width="1.6"/>`);
      } else if (s.kind === "points") {
        for (const p of s.points) {
          if (panel.yScale === "log" && p.y <= 0) {
            continue;
          }
          parts.push(
            `<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="4" fill="none" ` +
              `stroke="${c}" stroke-width="1.6"/>`,
          );
        }
      }
      parts.push(
        `<line x1="${x0 + w - 130}" y1="${legendY}" x2="${x0 + w - 112}" y2="${legendY}" ` +
          `stroke="${c}" stroke-width="2"/>`,
      );
      parts.push(
        `<text x="${x0 + w - 106}" y="${legendY + 4}" class="legend">${esc(s.name)}</text>`,
      );
      legendY += 15;
    }
  }
  parts.push(
    `<text x="${x0 + w / 2}" y="${y0 + h + 38}" class="label">${esc(panel.xLabel)}</text>`,
  );
  parts.push(
    `<text x="${offsetX + 16}" y="${y0 + h / 2}" class="label" ` +
      `transform="rotate(-90 ${offsetX + 16} ${y0 + h / 2})">${esc(panel.yLabel)}</text>`,
  );
  return parts.join("\n");
}

export function render(model: PlotModel): string {
  const width = PANEL_W * model.panels.length;
  const height = PANEL_H;
  const payload = Buffer.from(JSON.stringify(model), "utf8").toString("base64");
  const body = model.panels.map((p, i) => renderPanel(p, i * PANEL_W)).join("\n");
  return `<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">
<metadata id="plot-data">${payload}</metadata>
<style>
  .title { font: 13px sans-serif; text-anchor: middle; font-weight: bold; }
  .label { font: 12px sans-serif; text-anchor: middle; }
  .tick { font: 10px sans-serif; text-anchor: middle; fill: #333; }
  .legend { font: 10px sans-serif; }
  .note { font: 10px sans-serif; fill: #a00; }
  .frame { fill: none; stroke: #444; }
  .axis { stroke: #444; }
  .vline { stroke: #a00; stroke-dasharray: 6 4; stroke-width: 1.4; }
</style>
<rect width="${width}" height="${height}" fill="white"/>
${body}
</svg>
`;
}

/** Recover the embedded plot model from a rendered SVG. */
export function extractModel(svg: string): PlotModel {
  const m = svg.match(/<metadata id="plot-data">([^<]*)<\/metadata>/);
  if (!m) {
    throw new PlotError("SVG carries no plot-data metadata");
  }
  return JSON.parse(Buffer.from(m[1], "base64").toString("utf8")) as PlotModel;
}

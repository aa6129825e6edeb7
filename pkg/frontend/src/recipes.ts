/** One recipe per figure: the expected CSV schema and how its rows become a
 * plot model. Layout conventions follow the source figures: CDFs with the
 * favorable-propagation bound dashed, gain-vs-M lines, log-scale BER
 * waterfalls with the SNR threshold marked, SE-vs-K curves with their maxima
 * circled, and bucketed complexity/overhead heat maps. */

import { Manifest, Row, Schema } from "./csv.js";
import { CellSeries, LineSeries, PlotError, PlotModel, PointSeries, Series } from "./model.js";

export interface FigureRecipe {
  id: string;
  schema: Schema;
  build(rows: Row[], manifest: Manifest | null): PlotModel;
}

function groupBy<T extends string | number>(rows: Row[], key: (r: Row) => T): Map<T, Row[]> {
  const out = new Map<T, Row[]>();
  for (const r of rows) {
    const k = key(r);
    const bucket = out.get(k);
    if (bucket) {
      bucket.push(r);
    } else {
      out.set(k, [r]);
    }
  }
  return out;
}

function note(manifest: Manifest | null, key: string): number | null {
  const v = manifest?.notes?.[key];
  return typeof v === "number" ? v : null;
}

function schema(columns: string[], stringCols: string[] = []): Schema {
  const types: Schema["types"] = {};
  for (const c of columns) {
    types[c] = stringCols.includes(c) ? "string" : "number";
  }
  return { columns, types };
}

const fig2a: FigureRecipe = {
  id: "fig2a",
  schema: schema(["trial", "scenario", "K_served", "sum_capacity"], ["scenario"]),
  build(rows, manifest) {
    const series: Series[] = [];
    const groups = groupBy(rows, (r) => `${r.scenario}, K=${r.K_served}`);
    for (const [name, rs] of groups) {
      const values = rs.map((r) => r.sum_capacity as number).sort((a, b) => a - b);
      const points = values.map((v, i) => ({ x: v, y: (i + 1) / values.length }));
      series.push({ kind: "line", name, points } satisfies LineSeries);
    }
    const fp = note(manifest, "fp_bound");
    if (fp !== null) {
      series.push({ kind: "vline", name: "FP bound", x: fp });
    }
    return {
      figure: "fig2a",
      title: "Uplink sum capacity distribution",
      panels: [
        {
          title: "isotropic vs line-of-sight",
          xLabel: "sum capacity [bit/s/Hz]",
          yLabel: "cumulative probability",
          xScale: "linear",
          yScale: "linear",
          series,
        },
      ],
    };
  },
};

const fig2b: FigureRecipe = {
  id: "fig2b",
  schema: schema(["M", "scheme", "gain"], ["scheme"]),
  build(rows) {
    const series: Series[] = [];
    for (const [name, rs] of groupBy(rows, (r) => String(r.scheme))) {
      const points = rs
        .map((r) => ({ x: r.M as number, y: r.gain as number }))
        .sort((a, b) => a.x - b.x);
      series.push({ kind: "line", name, points });
    }
    return {
      figure: "fig2b",
      title: "Average array gain vs number of antennas",
      panels: [
        {
          title: "pilot-based vs open-loop beamforming",
          xLabel: "service antennas M",
          yLabel: "average array gain",
          xScale: "linear",
          yScale: "linear",
          series,
        },
      ],
    };
  },
};

const fig3: FigureRecipe = {
  id: "fig3",
  schema: schema(
    ["snr_db", "codeword_length", "ber", "bits_simulated", "censored"],
    [],
  ),
  build(rows, manifest) {
    const series: Series[] = [];
    for (const [n, rs] of groupBy(rows, (r) => r.codeword_length as number)) {
      const points = rs
        .map((r) => ({ x: r.snr_db as number, y: r.ber as number }))
        .sort((a, b) => a.x - b.x);
      series.push({ kind: "line", name: `n = ${n}`, points });
    }
    const thr = note(manifest, "snr_threshold_db");
    if (thr !== null) {
      series.push({ kind: "vline", name: "SE threshold", x: thr });
    }
    return {
      figure: "fig3",
      title: "Coded uplink BER vs SNR",
      panels: [
        {
          title: "QPSK, rate 1/2, MR combining",
          xLabel: "uplink SNR [dB]",
          yLabel: "bit error rate",
          xScale: "linear",
          yScale: "log",
          series,
        },
      ],
    };
  },
};

const fig4a: FigureRecipe = {
  id: "fig4a",
  schema: schema(["M", "scheme", "mean_se"], ["scheme"]),
  build(rows) {
    const series: Series[] = [];
    for (const [name, rs] of groupBy(rows, (r) => String(r.scheme))) {
      const points = rs
        .map((r) => ({ x: r.M as number, y: r.mean_se as number }))
        .sort((a, b) => a.x - b.x);
      series.push({ kind: "line", name, points });
    }
    return {
      figure: "fig4a",
      title: "Nonlinear vs linear processing, perfect CSI",
      panels: [
        {
          title: "sum spectral efficiency vs M",
          xLabel: "service antennas M",
          yLabel: "sum SE [bit/s/Hz]",
          xScale: "linear",
          yScale: "linear",
          series,
        },
      ],
    };
  },
};

const fig4b: FigureRecipe = {
  id: "fig4b",
  schema: schema(["K", "scheme", "reuse", "sum_se", "is_max"], ["scheme"]),
  build(rows) {
    const series: Series[] = [];
    const maxima: PointSeries = { kind: "points", name: "optimum", points: [] };
    for (const [name, rs] of groupBy(rows, (r) => String(r.scheme))) {
      const sorted = [...rs].sort((a, b) => (a.K as number) - (b.K as number));
      series.push({
        kind: "line",
        name,
        points: sorted.map((r) => ({ x: r.K as number, y: r.sum_se as number })),
      });
      for (const r of sorted) {
        if (Number(r.is_max) === 1) {
          maxima.points.push({ x: r.K as number, y: r.sum_se as number });
        }
      }
    }
    if (maxima.points.length) {
      series.push(maxima);
    }
    return {
      figure: "fig4b",
      title: "Multi-cell sum SE vs scheduled terminals",
      panels: [
        {
          title: "pilot reuse optimized per point",
          xLabel: "terminals K",
          yLabel: "sum SE [bit/s/Hz/cell]",
          xScale: "linear",
          yScale: "linear",
          series,
        },
      ],
    };
  },
};

const fig5: FigureRecipe = {
  id: "fig5",
  schema: schema(["tau", "M", "K", "scheme", "task", "flops", "watts"], ["scheme", "task"]),
  build(rows) {
    const totals = rows.filter((r) => r.task === "total");
    if (!totals.length) {
      throw new PlotError("fig5 CSV has no task=total rows");
    }
    const panels = [...groupBy(totals, (r) => String(r.scheme))].map(([scheme, rs]) => {
      const cells: CellSeries = {
        kind: "cells",
        name: `${scheme} total watts`,
        coloring: "log",
        cells: rs.map((r) => ({ x: r.tau as number, y: r.M as number, value: r.watts as number })),
      };
      return {
        title: `${scheme}: power [W]`,
        xLabel: "coherence block tau [symbols]",
        yLabel: "service antennas M",
        xScale: "linear" as const,
        yScale: "linear" as const,
        series: [cells],
      };
    });
    return { figure: "fig5", title: "Baseband computational power", panels };
  },
};

const fig6: FigureRecipe = {
  id: "fig6",
  schema: schema(
    ["mode", "tau", "M", "K", "ul_fraction", "dl_fraction", "bucket"],
    ["mode", "bucket"],
  ),
  build(rows) {
    const panels = [...groupBy(rows, (r) => String(r.mode))].map(([mode, rs]) => {
      const cells: CellSeries = {
        kind: "cells",
        name: `${mode} overhead`,
        coloring: "bucket",
        cells: rs.map((r) => ({ x: r.K as number, y: r.M as number, value: String(r.bucket) })),
      };
      return {
        title: `${mode.toUpperCase()}: CSI overhead`,
        xLabel: "terminals K",
        yLabel: "service antennas M",
        xScale: "linear" as const,
        yScale: "linear" as const,
        series: [cells],
      };
    });
    return { figure: "fig6", title: "Duplexing overhead feasibility", panels };
  },
};

export const RECIPES: Record<string, FigureRecipe> = Object.fromEntries(
  [fig2a, fig2b, fig3, fig4a, fig4b, fig5, fig6].map((r) => [r.id, r]),
);

/**
 * Shape CSV tables into plottable series.
 *
 * Curve kinds read the experiment-results schema
 * (distribution,params,n,alpha,method,metric,value,stderr,trials,seed):
 * one series per distinct `method` in first-appearance order, one point per
 * row, sorted by n within the series. The histogram kind reads the
 * histogram schema (bin_left,bin_right,count,n,trials,seed), one bar per row.
 */

import { CsvTable, PlotError, numericCell, requireColumns } from "./csv.js";

export type FigureKind =
  | "mean_curve"
  | "quantile_curve"
  | "coverage_curve"
  | "histogram";

export const FIGURE_KINDS: readonly FigureKind[] = [
  "mean_curve",
  "quantile_curve",
  "coverage_curve",
  "histogram",
];

export const CURVE_COLUMNS = ["n", "method", "value", "stderr"] as const;
export const HISTOGRAM_COLUMNS = ["bin_left", "bin_right", "count"] as const;

export interface SeriesPoint {
  x: number;
  y: number;
  /** half-width of the drawn error whisker (2 standard errors) */
  err: number;
}

export interface Series {
  label: string;
  points: SeriesPoint[];
}

export interface HistogramBar {
  left: number;
  right: number;
  count: number;
}

export function requiredColumns(kind: FigureKind): readonly string[] {
  return kind === "histogram" ? HISTOGRAM_COLUMNS : CURVE_COLUMNS;
}

export function curveSeries(table: CsvTable): Series[] {
  const col = requireColumns(table, CURVE_COLUMNS);
  if (table.rows.length === 0) {
    throw new PlotError("CSV body is empty: nothing to plot");
  }
  const byMethod = new Map<string, SeriesPoint[]>();
  table.rows.forEach((row, i) => {
    const label = row[col.method];
    const point = {
      x: numericCell(row, col.n, "n", i + 2),
      y: numericCell(row, col.value, "value", i + 2),
      err: 2 * numericCell(row, col.stderr, "stderr", i + 2),
    };
    const points = byMethod.get(label);
    if (points) {
      points.push(point);
    } else {
      byMethod.set(label, [point]);
    }
  });
  const series: Series[] = [];
  for (const [label, points] of byMethod) {
    // stable sort: ties keep CSV order
    const sorted = points
      .map((p, i) => ({ p, i }))
      .sort((a, b) => a.p.x - b.p.x || a.i - b.i)
      .map((e) => e.p);
    series.push({ label, points: sorted });
  }
  return series;
}

export function histogramBars(table: CsvTable): HistogramBar[] {
  const col = requireColumns(table, HISTOGRAM_COLUMNS);
  if (table.rows.length === 0) {
    throw new PlotError("CSV body is empty: nothing to plot");
  }
  return table.rows.map((row, i) => {
    const bar = {
      left: numericCell(row, col.bin_left, "bin_left", i + 2),
      right: numericCell(row, col.bin_right, "bin_right", i + 2),
      count: numericCell(row, col.count, "count", i + 2),
    };
    if (bar.right <= bar.left) {
      throw new PlotError(`histogram row ${i + 2} has bin_right <= bin_left`);
    }
    if (bar.count < 0) {
      throw new PlotError(`histogram row ${i + 2} has a negative count`);
    }
    return bar;
  });
}

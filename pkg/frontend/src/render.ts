/**
 * The figure pipeline: CSV text + spec in, SVG text out.
 *
 * renderText is a pure function of its arguments, so identical inputs give
 * byte-identical figures. File I/O lives only in render(), which validates
 * everything before opening the output path: a bad CSV never leaves a
 * partial file behind.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv, PlotError } from "./csv.js";
import {
  curveSeries,
  FigureKind,
  FIGURE_KINDS,
  histogramBars,
} from "./figure.js";
import { AxisLabels, renderCurves, renderHistogram } from "./svg.js";

export interface PlotSpec {
  inputCsv: string;
  figureKind: FigureKind;
  outputPath: string;
  referenceValue?: number;
  logY?: boolean;
}

const CURVE_LABELS: Record<Exclude<FigureKind, "histogram">, AxisLabels> = {
  mean_curve: { x: "sample size n", y: "expected bound" },
  quantile_curve: { x: "sample size n", y: "bound quantile" },
  coverage_curve: { x: "sample size n", y: "coverage" },
};

const HISTOGRAM_LABELS: AxisLabels = {
  x: "standardized sample mean",
  y: "count",
};

export function renderText(
  csvText: string,
  kind: FigureKind,
  referenceValue?: number,
  logY?: boolean,
): string {
  if (!FIGURE_KINDS.includes(kind)) {
    throw new PlotError(
      `unknown figure kind "${kind}"; expected one of ${FIGURE_KINDS.join(", ")}`,
    );
  }
  const table = parseCsv(csvText);
  if (kind === "histogram") {
    if (logY) {
      throw new PlotError("log-y is not supported for histograms");
    }
    return renderHistogram(histogramBars(table), HISTOGRAM_LABELS, referenceValue);
  }
  return renderCurves(
    curveSeries(table),
    CURVE_LABELS[kind],
    referenceValue,
    Boolean(logY),
  );
}

export function render(spec: PlotSpec): void {
  const csvText = readFileSync(spec.inputCsv, "utf8");
  const svg = renderText(csvText, spec.figureKind, spec.referenceValue, spec.logY);
  writeFileSync(spec.outputPath, svg, "utf8");
}

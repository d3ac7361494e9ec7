export { parseCsv, requireColumns, PlotError } from "./csv.js";
export {
  curveSeries,
  histogramBars,
  requiredColumns,
  FIGURE_KINDS,
} from "./figure.js";
export type { FigureKind, Series, SeriesPoint, HistogramBar } from "./figure.js";
export { renderText, render } from "./render.js";
export type { PlotSpec } from "./render.js";

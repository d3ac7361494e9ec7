/**
 * Hand-rolled SVG output. No DOM, no plotting library: every figure is a
 * fixed-size drawing built from lines, circles, rects and text, with
 * coordinates rounded to two decimals so identical inputs give identical
 * bytes.
 */

import { PlotError } from "./csv.js";
import { HistogramBar, Series } from "./figure.js";

export const WIDTH = 640;
export const HEIGHT = 420;
const MARGIN = { left: 64, right: 24, top: 24, bottom: 48 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export interface AxisLabels {
  x: string;
  y: string;
}

interface Scale {
  toPx(v: number): number;
  ticks: number[];
}

function fmt(px: number): string {
  return px.toFixed(2);
}

function fmtTick(v: number): string {
  const rounded = Number(v.toPrecision(4));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

function pad(lo: number, hi: number): [number, number] {
  if (lo === hi) {
    const d = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return [lo - d, hi + d];
  }
  const d = (hi - lo) * 0.05;
  return [lo - d, hi + d];
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  const span = hi - lo;
  const rawStep = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const span = hi - lo;
  return {
    toPx: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo),
    ticks: niceTicks(lo, hi, 5),
  };
}

function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  if (lo <= 0) {
    throw new PlotError(
      `log scale requires positive values, got minimum ${fmtTick(lo)}`,
    );
  }
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length < 2) {
    ticks.length = 0;
    for (const t of niceTicks(llo, lhi, 4)) {
      ticks.push(Number(Math.pow(10, t).toPrecision(4)));
    }
  }
  return {
    toPx: (v) => pxLo + ((Math.log10(v) - llo) / span) * (pxHi - pxLo),
    ticks,
  };
}

function xTicksFromValues(values: number[], lo: number, hi: number): number[] {
  const distinct = [...new Set(values)].sort((a, b) => a - b);
  return distinct.length >= 2 && distinct.length <= 8
    ? distinct
    : niceTicks(lo, hi, 5);
}

// ── SVG fragments ───────────────────────────────────────────

function open(parts: string[]): void {
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  );
}

function axes(
  parts: string[],
  xs: Scale,
  ys: Scale,
  labels: AxisLabels,
  xTicks: number[],
): void {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(`<g class="axis" stroke="black" fill="none">`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}"/>`);
  parts.push(`</g>`);
  parts.push(`<g class="ticks" fill="black">`);
  for (const t of xTicks) {
    const px = xs.toPx(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="black"/>`,
      `<text x="${fmt(px)}" y="${y0 + 18}" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of ys.ticks) {
    const py = ys.toPx(t);
    parts.push(
      `<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="black"/>`,
      `<text x="${x0 - 8}" y="${fmt(py + 4)}" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt((x0 + x1) / 2)}" y="${HEIGHT - 10}" text-anchor="middle">${labels.x}</text>`,
    `<text x="16" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">${labels.y}</text>`,
  );
  parts.push(`</g>`);
}

function referenceLine(parts: string[], py: number): void {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  parts.push(
    `<line class="refline" x1="${x0}" y1="${fmt(py)}" x2="${x1}" y2="${fmt(py)}" ` +
      `stroke="black" stroke-dasharray="6 4"/>`,
  );
}

function legend(parts: string[], labels: string[]): void {
  const x = WIDTH - MARGIN.right - 160;
  let y = MARGIN.top + 8;
  parts.push(`<g class="legend">`);
  labels.forEach((label, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      `<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${x + 28}" y="${y + 4}" fill="black">${escapeText(label)}</text>`,
    );
    y += 18;
  });
  parts.push(`</g>`);
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

// ── figures ─────────────────────────────────────────────────

export function renderCurves(
  series: Series[],
  labels: AxisLabels,
  reference: number | undefined,
  logY: boolean,
): string {
  const xsAll = series.flatMap((s) => s.points.map((p) => p.x));
  const ysLow = series.flatMap((s) =>
    s.points.map((p) => (logY ? p.y : p.y - p.err)),
  );
  const ysHigh = series.flatMap((s) => s.points.map((p) => p.y + p.err));
  if (reference !== undefined) {
    ysLow.push(reference);
    ysHigh.push(reference);
  }
  let yLo = Math.min(...ysLow);
  let yHi = Math.max(...ysHigh);
  if (logY && yLo <= 0) {
    throw new PlotError(
      `log scale requires positive values, got minimum ${fmtTick(yLo)}`,
    );
  }
  const [xLo, xHi] = pad(Math.min(...xsAll), Math.max(...xsAll));
  if (!logY) {
    [yLo, yHi] = pad(yLo, yHi);
  } else {
    yLo /= 1.1;
    yHi *= 1.1;
  }

  const xScale = linearScale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
  const yScale = (logY ? logScale : linearScale)(
    yLo,
    yHi,
    HEIGHT - MARGIN.bottom,
    MARGIN.top,
  );

  const parts: string[] = [];
  open(parts);
  axes(parts, xScale, yScale, labels, xTicksFromValues(xsAll, xLo, xHi));
  if (reference !== undefined) {
    referenceLine(parts, yScale.toPx(reference));
  }
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(`<g class="series" data-method="${escapeText(s.label)}">`);
    const d = s.points
      .map(
        (p, j) =>
          `${j === 0 ? "M" : "L"}${fmt(xScale.toPx(p.x))} ${fmt(yScale.toPx(p.y))}`,
      )
      .join(" ");
    parts.push(
      `<path class="line" d="${d}" fill="none" stroke="${color}" stroke-width="2"/>`,
    );
    for (const p of s.points) {
      const px = xScale.toPx(p.x);
      if (p.err > 0 && (!logY || p.y - p.err > 0)) {
        parts.push(
          `<line class="err" x1="${fmt(px)}" y1="${fmt(yScale.toPx(p.y - p.err))}" ` +
            `x2="${fmt(px)}" y2="${fmt(yScale.toPx(p.y + p.err))}" stroke="${color}"/>`,
        );
      }
      parts.push(
        `<circle class="pt" cx="${fmt(px)}" cy="${fmt(yScale.toPx(p.y))}" r="3" fill="${color}"/>`,
      );
    }
    parts.push(`</g>`);
  });
  legend(
    parts,
    series.map((s) => s.label),
  );
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}

export function renderHistogram(
  bars: HistogramBar[],
  labels: AxisLabels,
  reference: number | undefined,
): string {
  const [xLo, xHi] = pad(
    Math.min(...bars.map((b) => b.left)),
    Math.max(...bars.map((b) => b.right)),
  );
  const [, yHi] = pad(0, Math.max(...bars.map((b) => b.count)));
  const xScale = linearScale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
  const yScale = linearScale(0, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  open(parts);
  axes(parts, xScale, yScale, labels, niceTicks(xLo, xHi, 5));
  const base = HEIGHT - MARGIN.bottom;
  for (const b of bars) {
    const px = xScale.toPx(b.left);
    const w = xScale.toPx(b.right) - px;
    const py = yScale.toPx(b.count);
    parts.push(
      `<rect class="bar" x="${fmt(px)}" y="${fmt(py)}" width="${fmt(w)}" ` +
        `height="${fmt(base - py)}" fill="#1f77b4" stroke="white"/>`,
    );
  }
  if (reference !== undefined) {
    const px = xScale.toPx(reference);
    parts.push(
      `<line class="refline" x1="${fmt(px)}" y1="${base}" x2="${fmt(px)}" ` +
        `y2="${MARGIN.top}" stroke="black" stroke-dasharray="6 4"/>`,
    );
  }
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}

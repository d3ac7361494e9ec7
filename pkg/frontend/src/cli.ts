#!/usr/bin/env node
/**
 * plotgen --input results.csv --kind mean_curve --out figure.svg
 *         [--reference 0.95] [--log-y]
 *
 * Exit codes: 0 success, 2 validation (flags, CSV schema, unreadable
 * input), 3 output path not writable.
 */

import { PlotError } from "./csv.js";
import { FIGURE_KINDS, FigureKind } from "./figure.js";
import { render, PlotSpec } from "./render.js";

const USAGE = `usage: plotgen --input CSV --kind KIND --out SVG [--reference VALUE] [--log-y]
  KIND: ${FIGURE_KINDS.join(" | ")}
  --reference  horizontal reference line (vertical for histograms)
  --log-y      log-scale y axis (curve kinds only)`;

function parseArgs(argv: string[]): PlotSpec {
  let input: string | undefined;
  let kind: string | undefined;
  let out: string | undefined;
  let reference: number | undefined;
  let logY = false;

  const next = (flag: string, i: number): string => {
    if (i + 1 >= argv.length) {
      throw new PlotError(`${flag} requires a value`);
    }
    return argv[i + 1];
  };

  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--input":
        input = next("--input", i++);
        break;
      case "--kind":
        kind = next("--kind", i++);
        break;
      case "--out":
        out = next("--out", i++);
        break;
      case "--reference": {
        const raw = next("--reference", i++);
        reference = Number(raw);
        if (!Number.isFinite(reference)) {
          throw new PlotError(`--reference must be a finite number, got "${raw}"`);
        }
        break;
      }
      case "--log-y":
        logY = true;
        break;
      case "-h":
      case "--help":
        console.log(USAGE);
        process.exit(0);
      default:
        throw new PlotError(`unknown flag "${argv[i]}"`);
    }
  }
  if (!input) throw new PlotError("--input is required");
  if (!kind) throw new PlotError("--kind is required");
  if (!out) throw new PlotError("--out is required");
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new PlotError(
      `unknown figure kind "${kind}"; expected one of ${FIGURE_KINDS.join(", ")}`,
    );
  }
  return {
    inputCsv: input,
    figureKind: kind as FigureKind,
    outputPath: out,
    referenceValue: reference,
    logY,
  };
}

function main(): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  try {
    render(spec);
  } catch (err) {
    if (err instanceof PlotError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    const io = err as NodeJS.ErrnoException;
    if (io.syscall && io.path === spec.inputCsv) {
      console.error(`error: cannot read --input file: ${io.message}`);
      return 2;
    }
    console.error(`error: ${io.message}`);
    return 3;
  }
  return 0;
}

process.exit(main());

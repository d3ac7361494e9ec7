/**
 * Minimal CSV reading for the harness schemas.
 *
 * The upstream files never quote fields or embed separators, so a plain
 * split is exact. Validation errors are PlotError so the CLI can map them
 * to its validation exit code.
 */

export class PlotError extends Error {}

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text
    .split("\n")
    .map((line) => (line.endsWith("\r") ? line.slice(0, -1) : line))
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new PlotError("CSV is empty: no header line");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new PlotError(
        `CSV row ${i + 1} has ${cells.length} fields, header has ${header.length}`,
      );
    }
    rows.push(cells);
  }
  return { header, rows };
}

/** Resolve each required column name to its index; name the first one missing. */
export function requireColumns(
  table: CsvTable,
  names: readonly string[],
): Record<string, number> {
  const indices: Record<string, number> = {};
  for (const name of names) {
    const idx = table.header.indexOf(name);
    if (idx < 0) {
      throw new PlotError(`CSV is missing required column "${name}"`);
    }
    indices[name] = idx;
  }
  return indices;
}

export function numericCell(row: string[], idx: number, name: string, rowNo: number): number {
  const v = Number(row[idx]);
  if (!Number.isFinite(v)) {
    throw new PlotError(
      `column "${name}" row ${rowNo} is not a finite number: "${row[idx]}"`,
    );
  }
  return v;
}

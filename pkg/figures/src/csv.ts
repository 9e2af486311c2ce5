/** Minimal reader for the solver's CSV outputs (no quoting, one header). */

import { readFileSync } from "fs";

export class DataError extends Error {}

export interface Table {
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new DataError("empty CSV");
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",").map((c) => c.trim());
    if (cells.length !== columns.length) {
      throw new DataError(`row ${i + 1} has ${cells.length} cells, expected ${columns.length}`);
    }
    return cells;
  });
  if (rows.length === 0) throw new DataError("CSV has a header but no data rows");
  return { columns, rows };
}

export function loadCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new DataError(`cannot read CSV file ${JSON.stringify(path)}`);
  }
  return parseCsv(text);
}

export function requireColumns(table: Table, names: string[]): Record<string, number> {
  const index: Record<string, number> = {};
  for (const name of names) {
    const i = table.columns.indexOf(name);
    if (i < 0) {
      throw new DataError(
        `missing column ${JSON.stringify(name)}; found ${table.columns.join(", ")}`
      );
    }
    index[name] = i;
  }
  return index;
}

export function numeric(cell: string, column: string): number {
  const v = Number(cell);
  if (!isFinite(v)) throw new DataError(`non-numeric value ${JSON.stringify(cell)} in ${column}`);
  return v;
}

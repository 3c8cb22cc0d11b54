/** CSV loading and schema validation for the simulator's documented outputs. */

import Papa from "papaparse";

export class CsvError extends Error {}

export interface CsvTable {
  columns: string[];
  rows: Record<string, string>[];
}

/** Parse CSV text; reject empty input and ragged rows. */
export function parseCsv(text: string): CsvTable {
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const columns = result.meta.fields ?? [];
  if (columns.length === 0 || result.data.length === 0) {
    throw new CsvError("empty CSV: no data rows");
  }
  for (const err of result.errors) {
    if (err.code !== "UndetectableDelimiter") {
      throw new CsvError(`malformed CSV at row ${err.row}: ${err.message}`);
    }
  }
  return { columns, rows: result.data };
}

/** Require the named columns, naming the first one missing. */
export function requireColumns(table: CsvTable, needed: string[]): void {
  for (const name of needed) {
    if (!table.columns.includes(name)) {
      throw new CsvError(`schema mismatch: missing column '${name}'`);
    }
  }
}

export function numericColumn(table: CsvTable, name: string): number[] {
  requireColumns(table, [name]);
  return table.rows.map((row, index) => {
    const value = Number(row[name]);
    if (!Number.isFinite(value)) {
      throw new CsvError(`column '${name}' row ${index}: not a number (${row[name]})`);
    }
    return value;
  });
}

export function median(values: number[]): number {
  if (values.length === 0) throw new CsvError("median of empty column");
  const sorted = [...values].sort((a, b) => a - b);
  const mid = (sorted.length - 1) / 2;
  const lo = Math.floor(mid);
  const hi = Math.ceil(mid);
  return (sorted[lo] + sorted[hi]) / 2;
}

export function mean(values: number[]): number {
  if (values.length === 0) throw new CsvError("mean of empty column");
  return values.reduce((a, b) => a + b, 0) / values.length;
}

import fs from "node:fs";

import Papa from "papaparse";

import { PlotError } from "./model.js";

export type ColumnType = "number" | "string";

export interface Schema {
  /** Column names in their contractual order. */
  columns: string[];
  types: Record<string, ColumnType>;
}

export type Row = Record<string, number | string>;

/** Parse a CSV file and validate its header against the declared schema.
 * The header must match exactly (names and order); the offending column is
 * named in the error. */
export function readCsv(path: string, schema: Schema): Row[] {
  if (!fs.existsSync(path)) {
    throw new PlotError(`input CSV not found: ${path}`);
  }
  const text = fs.readFileSync(path, "utf8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length) {
    throw new PlotError(`malformed CSV ${path}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new PlotError(`CSV ${path} has no header row`);
  }
  const header = rows[0];
  for (let i = 0; i < Math.max(header.length, schema.columns.length); i++) {
    if (header[i] !== schema.columns[i]) {
      const got = header[i] ?? "(missing)";
      const want = schema.columns[i] ?? "(none)";
      throw new PlotError(
        `schema mismatch in ${path}: column ${i + 1} is '${got}', expected '${want}'`,
      );
    }
  }
  if (rows.length === 1) {
    throw new PlotError(`CSV ${path} contains a header but no data rows`);
  }
  return rows.slice(1).map((cells, rowIdx) => {
    const row: Row = {};
    schema.columns.forEach((name, i) => {
      const raw = cells[i];
      if (raw === undefined) {
        throw new PlotError(`row ${rowIdx + 2} of ${path} is missing column '${name}'`);
      }
      if (schema.types[name] === "number") {
        const value = Number(raw);
        if (!Number.isFinite(value)) {
          throw new PlotError(`row ${rowIdx + 2} of ${path}: '${raw}' is not a number in '${name}'`);
        }
        row[name] = value;
      } else {
        row[name] = raw;
      }
    });
    return row;
  });
}

export interface Manifest {
  notes?: Record<string, unknown>;
  [key: string]: unknown;
}

/** Manifests are optional annotation sources (bounds, thresholds). */
export function readManifest(path: string): Manifest | null {
  if (!fs.existsSync(path)) {
    return null;
  }
  return JSON.parse(fs.readFileSync(path, "utf8")) as Manifest;
}

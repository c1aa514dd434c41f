/**
 * Strict numeric CSV reading for the experiment output schemas.
 *
 * Every consumer declares the columns it needs; a missing or non-numeric
 * column fails with an error naming it, so schema drift surfaces at the
 * file boundary instead of as a garbled figure.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  /** column name -> values, all rows numeric */
  data: Map<string, number[]>;
  rows: number;
}

export function parseCsv(text: string, path: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new SchemaError(`${path}: expected a header and at least one data row`);
  }
  const columns = lines[0].split(",");
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${i} has ${parts.length} fields, header has ${columns.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const v = Number(parts[j]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${path}: column ${columns[j]}, row ${i}: not a number (${parts[j]})`);
      }
      data.get(columns[j])!.push(v);
    }
  }
  return { columns, data, rows: lines.length - 1 };
}

export function readCsv(path: string, required: string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new SchemaError(`${path}: file does not exist or is unreadable`);
  }
  const table = parseCsv(text, path);
  for (const col of required) {
    if (!table.data.has(col)) {
      throw new SchemaError(`${path}: missing column ${col}`);
    }
  }
  return table;
}

export function column(table: Table, name: string, path: string): number[] {
  const values = table.data.get(name);
  if (values === undefined) {
    throw new SchemaError(`${path}: missing column ${name}`);
  }
  return values;
}

export function readJson(path: string): unknown {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new SchemaError(`${path}: file does not exist or is unreadable`);
  }
  try {
    return JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${path}: invalid JSON (${(err as Error).message})`);
  }
}

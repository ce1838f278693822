import { readFileSync } from "node:fs";
import { basename } from "node:path";
import Papa from "papaparse";

export const REQUIRED_COLUMNS = [
  "f_hz",
  "S_x_serial",
  "S_x_parallel",
  "S_x_baseline",
  "gain_serial_db",
  "gain_parallel_db",
] as const;

export type ColumnName = (typeof REQUIRED_COLUMNS)[number];

export interface FigCsv {
  /** Path the file was loaded from. */
  path: string;
  /** Legend label: file name without directory or extension. */
  label: string;
  /** Topology inferred from the file name, used to pick the trace columns. */
  topology: "serial" | "parallel";
  columns: Record<ColumnName, number[]>;
}

function inferTopology(path: string): "serial" | "parallel" {
  const name = basename(path);
  if (name.includes("parallel")) return "parallel";
  return "serial";
}

/**
 * Load one fig5 CSV. Leading `#` comment lines are skipped. Throws with the
 * file name on an empty table and with the column and file names on a
 * missing column.
 */
export function loadFigCsv(path: string): FigCsv {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<Record<string, number>>(text, {
    header: true,
    comments: "#",
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new Error(`empty CSV: ${path} has no data rows`);
  }
  const fields = parsed.meta.fields ?? [];
  const columns = {} as Record<ColumnName, number[]>;
  for (const name of REQUIRED_COLUMNS) {
    if (!fields.includes(name)) {
      throw new Error(`missing column '${name}' in ${path}`);
    }
    columns[name] = rows.map((row) => {
      const v = row[name];
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new Error(`non-numeric value in column '${name}' of ${path}`);
      }
      return v;
    });
  }
  return {
    path,
    label: basename(path).replace(/\.csv$/, ""),
    topology: inferTopology(path),
    columns,
  };
}

/**
 * Readers for the simulator's run artifacts: metrics.csv and manifest.json.
 *
 * metrics.csv is long-format with the fixed header
 * `snr_db,metric,value,n_trials`; one row per (SNR point, metric kind).
 */

import fs from "node:fs";
import path from "node:path";

export type MetricKind = "p_acq" | "nmse" | "ber";

export interface MetricRow {
  snrDb: number;
  metric: string;
  value: number;
  nTrials: number;
}

export interface RunData {
  /** Series label: manifest label when present, else the directory name. */
  label: string;
  rows: MetricRow[];
}

const HEADER = ["snr_db", "metric", "value", "n_trials"];

export class SchemaError extends Error {}

function parseNumber(text: string, column: string, line: number): number {
  if (text === "inf") return Infinity;
  const v = Number(text);
  if (text.trim() === "" || Number.isNaN(v)) {
    throw new SchemaError(`metrics.csv line ${line}: column '${column}' is not numeric: '${text}'`);
  }
  return v;
}

export function parseMetricsCsv(text: string): MetricRow[] {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) throw new SchemaError("metrics.csv is empty");
  const header = lines[0].split(",");
  for (const col of HEADER) {
    if (!header.includes(col)) {
      throw new SchemaError(`metrics.csv header is missing column '${col}'`);
    }
  }
  const idx = HEADER.map((c) => header.indexOf(c));
  return lines.slice(1).map((ln, i) => {
    const cells = ln.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`metrics.csv line ${i + 2}: expected ${header.length} cells, got ${cells.length}`);
    }
    return {
      snrDb: parseNumber(cells[idx[0]], "snr_db", i + 2),
      metric: cells[idx[1]],
      value: parseNumber(cells[idx[2]], "value", i + 2),
      nTrials: Math.trunc(parseNumber(cells[idx[3]], "n_trials", i + 2)),
    };
  });
}

export function loadRun(dir: string): RunData {
  const rows = parseMetricsCsv(fs.readFileSync(path.join(dir, "metrics.csv"), "utf8"));
  let label = path.basename(path.resolve(dir));
  const manifestPath = path.join(dir, "manifest.json");
  if (fs.existsSync(manifestPath)) {
    const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf8"));
    if (typeof manifest.label === "string" && manifest.label.length > 0) {
      label = manifest.label;
    }
  }
  return { label, rows };
}

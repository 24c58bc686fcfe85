/**
 * Metric series: one labelled (snr, value) polyline per run and metric kind.
 */

import { MetricKind, RunData } from "./csv.js";

export interface SeriesPoint {
  snrDb: number;
  value: number;
}

export interface MetricSeries {
  label: string;
  metric: MetricKind;
  points: SeriesPoint[];
}

export class UsageError extends Error {}

/** Extract one metric from each run, points sorted by SNR. */
export function buildSeries(runs: RunData[], metric: MetricKind): MetricSeries[] {
  const out: MetricSeries[] = [];
  for (const run of runs) {
    const points = run.rows
      .filter((r) => r.metric === metric)
      .map((r) => ({ snrDb: r.snrDb, value: r.value }))
      .sort((a, b) => a.snrDb - b.snrDb);
    if (points.length > 0) {
      out.push({ label: run.label, metric, points });
    }
  }
  if (out.length === 0) {
    throw new UsageError(`no '${metric}' rows found in the given runs`);
  }
  return out;
}

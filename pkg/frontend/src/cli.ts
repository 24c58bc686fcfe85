#!/usr/bin/env node
/**
 * plot --runs <dir>... --figure pacq|nmse|ber --out <file>
 *
 * Reads each run directory's metrics.csv (+ manifest.json for the label),
 * overlays one series per run, and writes a deterministic SVG figure.
 */

import fs from "node:fs";
import path from "node:path";

import { loadRun, MetricKind } from "./csv.js";
import { buildSeries, UsageError } from "./series.js";
import { renderFigure } from "./svg.js";

const FIGURES: Record<string, MetricKind> = {
  pacq: "p_acq",
  nmse: "nmse",
  ber: "ber",
};

interface Args {
  runs: string[];
  figure: MetricKind;
  out: string;
}

export function parseArgs(argv: string[]): Args {
  const runs: string[] = [];
  let figure: MetricKind | undefined;
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--runs") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
        runs.push(argv[++i]);
      }
    } else if (a === "--figure") {
      const name = argv[++i];
      if (!(name in FIGURES)) {
        throw new UsageError(`--figure must be one of ${Object.keys(FIGURES).join("|")}, got '${name}'`);
      }
      figure = FIGURES[name];
    } else if (a === "--out") {
      out = argv[++i];
    } else if (a === "plot") {
      // tolerated subcommand word
    } else {
      throw new UsageError(`unknown argument '${a}'`);
    }
  }
  if (runs.length === 0) throw new UsageError("--runs requires at least one run directory");
  if (!figure) throw new UsageError("--figure is required");
  if (!out) throw new UsageError("--out is required");
  return { runs, figure, out };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const runs = args.runs.map(loadRun);
    const series = buildSeries(runs, args.figure);
    const svg = renderFigure(series, args.figure);
    fs.mkdirSync(path.dirname(path.resolve(args.out)), { recursive: true });
    fs.writeFileSync(args.out, svg);
    console.log(`wrote ${args.out} (${series.length} series)`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const entry = process.argv[1] ? path.resolve(process.argv[1]) : "";
if (entry.endsWith("cli.js") || entry.endsWith("dsuwb-plot")) {
  process.exit(main(process.argv.slice(2)));
}

export { loadRun, parseMetricsCsv, SchemaError } from "./csv.js";
export type { MetricKind, MetricRow, RunData } from "./csv.js";
export { buildSeries, UsageError } from "./series.js";
export type { MetricSeries, SeriesPoint } from "./series.js";
export { extractFigureData, renderFigure } from "./svg.js";
export type { FigureData } from "./svg.js";
export { main as cliMain, parseArgs } from "./cli.js";

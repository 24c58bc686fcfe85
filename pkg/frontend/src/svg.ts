/**
 * Deterministic SVG renderer for metric-vs-SNR figures.
 *
 * Acquisition probability uses a linear [0, 1] axis; timing error and BER use
 * a decade log axis where exact zeros are drawn as floor markers on the axis
 * rather than dropped. The plotted values are embedded verbatim as JSON inside
 * the SVG's <metadata> element so the figure round-trips its inputs exactly.
 */

import { MetricKind } from "./csv.js";
import { MetricSeries, UsageError } from "./series.js";

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const AXIS_TITLES: Record<MetricKind, { title: string; y: string }> = {
  p_acq: { title: "Acquisition probability vs SNR", y: "P(acquisition)" },
  nmse: { title: "Normalized timing MSE vs SNR", y: "timing MSE / Ts^2" },
  ber: { title: "Bit error rate vs SNR", y: "BER" },
};

function fmt(v: number): string {
  return v.toFixed(2);
}

function tickLabel(v: number, log: boolean): string {
  if (log) return `1e${Math.round(Math.log10(v))}`;
  return Number.isInteger(v) ? String(v) : String(Number(v.toFixed(3)));
}

export interface FigureData {
  metric: MetricKind;
  series: { label: string; points: [number, number][] }[];
}

export function renderFigure(seriesList: MetricSeries[], metric: MetricKind): string {
  if (seriesList.length === 0) {
    throw new UsageError("at least one series is required");
  }
  const log = metric !== "p_acq";
  const xs = seriesList.flatMap((s) => s.points.map((p) => p.snrDb))
    .filter((x) => Number.isFinite(x));
  if (xs.length === 0) throw new UsageError("no finite SNR points to plot");
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xSpan = xMax > xMin ? xMax - xMin : 1;

  let yMin = 0;
  let yMax = 1;
  if (log) {
    const positive = seriesList.flatMap((s) => s.points.map((p) => p.value))
      .filter((v) => v > 0);
    const top = positive.length ? Math.max(...positive) : 1;
    const bottom = positive.length ? Math.min(...positive) : 1e-6;
    yMax = Math.pow(10, Math.ceil(Math.log10(top)));
    yMin = Math.pow(10, Math.floor(Math.log10(bottom)));
    if (yMin >= yMax) yMin = yMax / 10;
  }

  const px = (x: number) => MARGIN.left + ((x - xMin) / xSpan) * PLOT_W;
  const py = (v: number) => {
    let frac: number;
    if (log) {
      const clamped = Math.max(v, yMin);
      frac = (Math.log10(clamped) - Math.log10(yMin)) / (Math.log10(yMax) - Math.log10(yMin));
    } else {
      frac = Math.min(Math.max(v, 0), 1);
    }
    return MARGIN.top + (1 - frac) * PLOT_H;
  };

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`);
  const data: FigureData = {
    metric,
    series: seriesList.map((s) => ({
      label: s.label,
      points: s.points.map((p) => [p.snrDb, p.value] as [number, number]),
    })),
  };
  parts.push(`<metadata id="series-data">${escapeXml(JSON.stringify(data))}</metadata>`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${escapeXml(AXIS_TITLES[metric].title)}</text>`);

  // gridlines and ticks
  const yTicks: number[] = [];
  if (log) {
    for (let d = Math.round(Math.log10(yMin)); d <= Math.round(Math.log10(yMax)); d++) {
      yTicks.push(Math.pow(10, d));
    }
  } else {
    for (let i = 0; i <= 5; i++) yTicks.push(i / 5);
  }
  for (const t of yTicks) {
    const y = py(t);
    parts.push(`<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#ddd"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${tickLabel(t, log)}</text>`);
  }
  const xTickCount = Math.min(xs.length <= 1 ? 1 : 11, Math.round(xSpan) + 1);
  for (let i = 0; i < Math.max(xTickCount, 2); i++) {
    const x = xMin + (xSpan * i) / Math.max(xTickCount - 1, 1);
    parts.push(`<line x1="${fmt(px(x))}" y1="${MARGIN.top}" x2="${fmt(px(x))}" y2="${HEIGHT - MARGIN.bottom}" stroke="#eee"/>`);
    parts.push(`<text x="${fmt(px(x))}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle" font-size="11">${tickLabel(x, false)}</text>`);
  }
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${PLOT_W}" height="${PLOT_H}" fill="none" stroke="#333"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">SNR (dB)</text>`);
  parts.push(`<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${HEIGHT / 2})">${escapeXml(AXIS_TITLES[metric].y)}</text>`);

  seriesList.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    const finite = s.points.filter((p) => Number.isFinite(p.snrDb));
    const drawable = log ? finite.filter((p) => p.value > 0) : finite;
    if (drawable.length > 0) {
      const d = drawable.map((p) => `${fmt(px(p.snrDb))},${fmt(py(p.value))}`).join(" ");
      parts.push(`<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
      for (const p of drawable) {
        parts.push(`<circle cx="${fmt(px(p.snrDb))}" cy="${fmt(py(p.value))}" r="3" fill="${color}"/>`);
      }
    }
    if (log) {
      // zeros sit on the axis floor as open down-triangles instead of vanishing
      for (const p of finite.filter((q) => q.value === 0)) {
        const x = px(p.snrDb);
        const y = HEIGHT - MARGIN.bottom;
        parts.push(`<path d="M ${fmt(x - 4)} ${fmt(y - 7)} L ${fmt(x + 4)} ${fmt(y - 7)} L ${fmt(x)} ${fmt(y - 1)} Z" fill="none" stroke="${color}" stroke-width="1.5"/>`);
      }
    }
    const ly = MARGIN.top + 14 + si * 16;
    parts.push(`<line x1="${WIDTH - MARGIN.right - 150}" y1="${ly - 4}" x2="${WIDTH - MARGIN.right - 126}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${WIDTH - MARGIN.right - 120}" y="${ly}" font-size="11">${escapeXml(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Recover the exact plotted values from a rendered figure. */
export function extractFigureData(svgText: string): FigureData {
  const match = svgText.match(/<metadata id="series-data">([\s\S]*?)<\/metadata>/);
  if (!match) throw new UsageError("no embedded series data found in the SVG");
  return JSON.parse(unescapeXml(match[1])) as FigureData;
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function unescapeXml(text: string): string {
  return text.replace(/&lt;/g, "<").replace(/&gt;/g, ">").replace(/&amp;/g, "&");
}

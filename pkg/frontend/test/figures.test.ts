import { describe, expect, test } from "vitest";

import { MetricRow, RunData } from "../src/csv.js";
import { buildSeries, UsageError } from "../src/series.js";
import { extractFigureData, renderFigure } from "../src/svg.js";

function run(label: string, metric: string, pairs: [number, number][]): RunData {
  const rows: MetricRow[] = pairs.map(([snrDb, value]) => ({
    snrDb, metric, value, nTrials: 500,
  }));
  return { label, rows };
}

describe("buildSeries", () => {
  test("one series per run, sorted by snr", () => {
    const runs = [
      run("a", "p_acq", [[4, 0.2], [0, 0.0], [2, 0.1]]),
      run("b", "p_acq", [[0, 0.05], [2, 0.2], [4, 0.4]]),
    ];
    const series = buildSeries(runs, "p_acq");
    expect(series).toHaveLength(2);
    expect(series[0].points.map((p) => p.snrDb)).toEqual([0, 2, 4]);
  });

  test("metric absent everywhere raises usage error", () => {
    expect(() => buildSeries([run("a", "p_acq", [[0, 0.1]])], "ber"))
      .toThrow(UsageError);
  });
});

describe("renderFigure", () => {
  const pacq = buildSeries([run("x", "p_acq", [[0, 0.0], [10, 0.5], [20, 1.0]])], "p_acq");
  const ber = buildSeries([run("x", "ber", [[0, 0.4], [10, 1e-3], [20, 0]])], "ber");

  test("acquisition axis is linear in [0, 1]", () => {
    const svg = renderFigure(pacq, "p_acq");
    expect(svg).toContain("Acquisition probability");
    expect(svg).toContain(">1<");
    expect(svg).toContain(">0.2<");
  });

  test("log figure keeps zero values as floor markers", () => {
    const svg = renderFigure(ber, "ber");
    // two positive circles, one triangle path for the zero
    expect((svg.match(/<circle/g) ?? []).length).toBe(2);
    expect((svg.match(/<path d="M /g) ?? []).length).toBe(1);
    expect(svg).toContain("1e-3");
  });

  test("deterministic byte output", () => {
    expect(renderFigure(ber, "ber")).toBe(renderFigure(ber, "ber"));
  });

  test("empty series set rejected", () => {
    expect(() => renderFigure([], "ber")).toThrow(UsageError);
  });
});

describe("round trip", () => {
  test("embedded data equals the inputs exactly", () => {
    const values: [number, number][] = [
      [0, 0.18754321098765432], [2, 1.25e-4], [4, 0], [6, 0.9999999999999999],
    ];
    const series = buildSeries([run("exact", "nmse", values)], "nmse");
    const data = extractFigureData(renderFigure(series, "nmse"));
    expect(data.metric).toBe("nmse");
    expect(data.series[0].label).toBe("exact");
    expect(data.series[0].points).toEqual(values);
  });
});

import { describe, expect, test } from "vitest";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { loadRun, parseMetricsCsv, SchemaError } from "../src/csv.js";

const SAMPLE = [
  "snr_db,metric,value,n_trials",
  "0.0,p_acq,0.01,500",
  "0.0,nmse,0.1875,500",
  "2.0,p_acq,0.05,500",
  "inf,ber,0.0,500",
].join("\n") + "\n";

describe("parseMetricsCsv", () => {
  test("parses long-format rows", () => {
    const rows = parseMetricsCsv(SAMPLE);
    expect(rows).toHaveLength(4);
    expect(rows[0]).toEqual({ snrDb: 0, metric: "p_acq", value: 0.01, nTrials: 500 });
    expect(rows[3].snrDb).toBe(Infinity);
    expect(rows[3].value).toBe(0);
  });

  test("header only yields no rows", () => {
    expect(parseMetricsCsv("snr_db,metric,value,n_trials\n")).toEqual([]);
  });

  test("missing column named in the error", () => {
    expect(() => parseMetricsCsv("snr_db,metric,value\n1,p_acq,0.5\n"))
      .toThrow(/n_trials/);
  });

  test("non-numeric cell named by column", () => {
    const bad = "snr_db,metric,value,n_trials\nx,p_acq,0.5,10\n";
    expect(() => parseMetricsCsv(bad)).toThrow(SchemaError);
    expect(() => parseMetricsCsv(bad)).toThrow(/snr_db/);
  });

  test("ragged row rejected", () => {
    expect(() => parseMetricsCsv("snr_db,metric,value,n_trials\n1,p_acq,0.5\n"))
      .toThrow(/expected 4 cells/);
  });
});

describe("loadRun", () => {
  test("label from manifest, fallback to directory name", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "runload-"));
    fs.writeFileSync(path.join(dir, "metrics.csv"), SAMPLE);
    expect(loadRun(dir).label).toBe(path.basename(dir));
    fs.writeFileSync(path.join(dir, "manifest.json"), JSON.stringify({ label: "designed" }));
    expect(loadRun(dir).label).toBe("designed");
    expect(loadRun(dir).rows).toHaveLength(4);
  });
});

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { CsvError, mean, median, numericColumn, parseCsv } from "../src/csv.js";
import {
  FIGURE_KINDS,
  buildChart,
  buildHistogram,
  buildTrajectory,
  phaseBoundaries,
} from "../src/options.js";
import { renderSvg } from "../src/render.js";

const here = dirname(fileURLToPath(import.meta.url));

function fixture(name: string) {
  return parseCsv(readFileSync(join(here, "fixtures", name), "utf-8"));
}

const INPUT_FOR: Record<string, string> = {
  trajectory: "trajectory.csv",
  ceiling: "trajectory.csv",
  reputation: "trajectory.csv",
  histogram: "sweep_outcomes.csv",
  heatmap: "sensitivity.csv",
  pareto: "pareto.csv",
};

describe("csv parsing", () => {
  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(CsvError);
    expect(() => parseCsv("a,b\n")).toThrow(/empty CSV/);
  });

  it("names the missing column on schema mismatch", () => {
    const table = parseCsv("period,phase\n0,x\n");
    expect(() => buildTrajectory(table)).toThrow(/missing column 'observer'/);
  });
});

describe("figure kinds", () => {
  for (const kind of FIGURE_KINDS) {
    it(`renders ${kind} to SVG without error`, () => {
      const table = fixture(INPUT_FOR[kind]);
      const chart = buildChart(kind, table);
      const svg = renderSvg(chart);
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.length).toBeGreaterThan(2000);
    });
  }
});

describe("trajectory", () => {
  it("marks exactly four phase boundaries on the bundled case", () => {
    const table = fixture("trajectory.csv");
    const boundaries = phaseBoundaries(table);
    expect(boundaries).toEqual([12, 52, 56, 71]);
    const chart = buildTrajectory(table);
    expect(chart.meta.boundaries).toEqual([12, 52, 56, 71]);
    const series = chart.option.series as any[];
    expect(series[0].markLine.data).toHaveLength(4);
  });

  it("draws one line per directed dyad", () => {
    const chart = buildTrajectory(fixture("trajectory.csv"));
    expect(chart.meta.dyads).toHaveLength(2);
  });
});

describe("ceiling", () => {
  it("overlays both ceiling variants, labeled", () => {
    const chart = buildChart("ceiling", fixture("trajectory.csv"));
    const names = (chart.option.series as any[]).map((s) => s.name);
    expect(names).toContain("ceiling (1 - R)");
    expect(names).toContain("ceiling (1 - 0.6 R)");
  });
});

describe("histogram", () => {
  it("places the median marker at the CSV-computed median", () => {
    const table = fixture("sweep_outcomes.csv");
    const chart = buildHistogram(table, "negativity_ratio");
    const expected = median(numericColumn(table, "negativity_ratio"));
    expect(chart.meta.median).toBe(expected);
    const markData = (chart.option.series as any[])[0].markLine.data;
    const medianMark = markData.find((d: any) => d.name === "median");
    expect(medianMark.xAxis).toBe(expected);
  });

  it("places the mean marker at the CSV-computed mean", () => {
    const table = fixture("sweep_outcomes.csv");
    const chart = buildHistogram(table, "negativity_ratio");
    const expected = mean(numericColumn(table, "negativity_ratio"));
    const markData = (chart.option.series as any[])[0].markLine.data;
    const meanMark = markData.find((d: any) => d.name === "mean");
    expect(meanMark.xAxis).toBe(expected);
  });

  it("rejects an unknown metric column by name", () => {
    const table = fixture("sweep_outcomes.csv");
    expect(() => buildHistogram(table, "sparkle")).toThrow(/missing column 'sparkle'/);
  });
});

describe("heatmap", () => {
  it("covers every parameter/metric pair", () => {
    const chart = buildChart("heatmap", fixture("sensitivity.csv"));
    const cells = (chart.option.series as any[])[0].data;
    expect(cells).toHaveLength(7 * 7);
  });
});

describe("pareto", () => {
  it("plots every frontier row", () => {
    const table = fixture("pareto.csv");
    const chart = buildChart("pareto", table);
    expect(chart.meta.size).toBe(table.rows.length);
  });
});

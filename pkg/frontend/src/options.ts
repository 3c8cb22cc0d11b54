/** Chart-option builders, one per figure kind.
 *
 * Pure functions from parsed CSV tables to ECharts options plus the
 * data-derived values (phase boundaries, medians, means) the markers are
 * placed at, so tests can assert marker positions without rendering.
 */

import type { EChartsOption } from "echarts";
import { CsvTable, CsvError, mean, median, numericColumn, requireColumns } from "./csv.js";

export interface BuiltChart {
  option: EChartsOption;
  meta: Record<string, unknown>;
}

const TRAJECTORY_COLUMNS = [
  "period", "phase", "observer", "partner",
  "partner_action", "signal", "trust", "reputation_damage",
];

interface DyadSeries {
  name: string;
  points: [number, number][];
}

function dyadSeries(table: CsvTable, column: string): DyadSeries[] {
  requireColumns(table, TRAJECTORY_COLUMNS);
  const byDyad = new Map<string, [number, number][]>();
  table.rows.forEach((row, index) => {
    const period = Number(row.period);
    const value = Number(row[column]);
    if (!Number.isFinite(period) || !Number.isFinite(value)) {
      throw new CsvError(`trajectory row ${index}: bad period/${column}`);
    }
    const key = `${row.observer}→${row.partner}`;
    if (!byDyad.has(key)) byDyad.set(key, []);
    byDyad.get(key)!.push([period, value]);
  });
  return [...byDyad.entries()].map(([name, points]) => ({
    name,
    points: points.sort((a, b) => a[0] - b[0]),
  }));
}

/** Periods at which the phase column changes (boundary = first period of
 * the next phase). */
export function phaseBoundaries(table: CsvTable): number[] {
  requireColumns(table, ["period", "phase"]);
  const byPeriod = new Map<number, string>();
  for (const row of table.rows) {
    byPeriod.set(Number(row.period), row.phase);
  }
  const periods = [...byPeriod.keys()].sort((a, b) => a - b);
  const boundaries: number[] = [];
  for (let i = 1; i < periods.length; i++) {
    if (byPeriod.get(periods[i]) !== byPeriod.get(periods[i - 1])) {
      boundaries.push(periods[i]);
    }
  }
  return boundaries;
}

function boundaryMarkLine(boundaries: number[]) {
  return {
    silent: true,
    symbol: "none",
    lineStyle: { type: "dashed" as const, color: "#888" },
    data: boundaries.map((period) => ({ xAxis: period })),
  };
}

export function buildTrajectory(table: CsvTable): BuiltChart {
  const series = dyadSeries(table, "trust");
  const boundaries = phaseBoundaries(table);
  return {
    option: {
      title: { text: "Trust evolution" },
      tooltip: { trigger: "axis" },
      legend: { top: 24 },
      xAxis: { type: "value", name: "period" },
      yAxis: { type: "value", name: "trust", min: 0, max: 1 },
      series: series.map((s, index) => ({
        name: s.name,
        type: "line",
        showSymbol: false,
        data: s.points,
        ...(index === 0 ? { markLine: boundaryMarkLine(boundaries) } : {}),
      })),
    },
    meta: { boundaries, dyads: series.map((s) => s.name) },
  };
}

export function buildReputation(table: CsvTable): BuiltChart {
  const series = dyadSeries(table, "reputation_damage");
  const boundaries = phaseBoundaries(table);
  return {
    option: {
      title: { text: "Reputation damage" },
      legend: { top: 24 },
      xAxis: { type: "value", name: "period" },
      yAxis: { type: "value", name: "reputation damage", min: 0, max: 1 },
      series: series.map((s, index) => ({
        name: s.name,
        type: "line",
        showSymbol: false,
        data: s.points,
        ...(index === 0 ? { markLine: boundaryMarkLine(boundaries) } : {}),
      })),
    },
    meta: { boundaries },
  };
}

/** Dyad-mean trust against both published ceiling variants. */
export function buildCeiling(table: CsvTable): BuiltChart {
  const trust = dyadSeries(table, "trust");
  const damage = dyadSeries(table, "reputation_damage");
  const periods = trust[0].points.map((p) => p[0]);
  const meanAt = (seriesList: DyadSeries[], index: number) =>
    seriesList.reduce((acc, s) => acc + s.points[index][1], 0) / seriesList.length;
  const meanTrust: [number, number][] = [];
  const ceiling: [number, number][] = [];
  const ceilingSoft: [number, number][] = [];
  periods.forEach((period, index) => {
    const damageMean = meanAt(damage, index);
    meanTrust.push([period, meanAt(trust, index)]);
    ceiling.push([period, 1 - damageMean]);
    ceilingSoft.push([period, 1 - 0.6 * damageMean]);
  });
  const boundaries = phaseBoundaries(table);
  return {
    option: {
      title: { text: "Trust ceiling" },
      legend: { top: 24 },
      xAxis: { type: "value", name: "period" },
      yAxis: { type: "value", min: 0, max: 1 },
      series: [
        {
          name: "mean trust", type: "line", showSymbol: false, data: meanTrust,
          markLine: boundaryMarkLine(boundaries),
        },
        {
          name: "ceiling (1 - R)", type: "line", showSymbol: false,
          lineStyle: { type: "dashed" }, data: ceiling,
        },
        {
          name: "ceiling (1 - 0.6 R)", type: "line", showSymbol: false,
          lineStyle: { type: "dotted" }, data: ceilingSoft,
        },
      ],
    },
    meta: { boundaries, seriesNames: ["mean trust", "ceiling (1 - R)", "ceiling (1 - 0.6 R)"] },
  };
}

export function buildHistogram(table: CsvTable, metric: string, bins = 40): BuiltChart {
  const values = numericColumn(table, metric);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const width = hi > lo ? (hi - lo) / bins : 1;
  const counts = new Array<number>(bins).fill(0);
  for (const v of values) {
    const bin = Math.min(bins - 1, Math.floor((v - lo) / width));
    counts[bin] += 1;
  }
  const med = median(values);
  const avg = mean(values);
  return {
    option: {
      title: { text: `Distribution of ${metric}` },
      xAxis: { type: "value", name: metric },
      yAxis: { type: "value", name: "configurations" },
      series: [
        {
          name: metric,
          type: "bar",
          barWidth: "95%",
          data: counts.map((count, k) => [lo + (k + 0.5) * width, count]),
          markLine: {
            symbol: "none",
            data: [
              { xAxis: med, name: "median", lineStyle: { color: "#2a8f2a" } },
              { xAxis: avg, name: "mean", lineStyle: { color: "#c23531", type: "dashed" } },
            ],
            label: { formatter: "{b}" },
          },
        },
      ],
    },
    meta: { median: med, mean: avg, bins, lo, hi },
  };
}

const SENSITIVITY_METRICS = [
  "negativity_ratio", "hysteresis_recovery", "cumulative_amplification",
  "dependency_amplification", "building_rate", "single_period_erosion",
  "time_to_half_recovery",
];

export function buildHeatmap(table: CsvTable): BuiltChart {
  requireColumns(table, ["parameter", ...SENSITIVITY_METRICS]);
  const params = table.rows.map((row) => row.parameter);
  const cells: [number, number, number][] = [];
  table.rows.forEach((row, y) => {
    SENSITIVITY_METRICS.forEach((metric, x) => {
      cells.push([x, y, Number(row[metric])]);
    });
  });
  return {
    option: {
      title: { text: "Parameter sensitivity (Pearson r)" },
      grid: { left: 140, top: 60 },
      xAxis: { type: "category", data: SENSITIVITY_METRICS, axisLabel: { rotate: 40 } },
      yAxis: { type: "category", data: params },
      visualMap: {
        min: -1, max: 1, calculable: true, orient: "horizontal",
        inRange: { color: ["#313695", "#ffffff", "#a50026"] },
      },
      series: [{
        type: "heatmap",
        data: cells,
        label: { show: true, formatter: (p: any) => Number(p.value[2]).toFixed(2) },
      }],
    },
    meta: { parameters: params, metrics: SENSITIVITY_METRICS },
  };
}

export function buildPareto(table: CsvTable): BuiltChart {
  requireColumns(table, ["negativity_deviation", "hysteresis_recovery",
                         "cumulative_amplification"]);
  const xs = numericColumn(table, "negativity_deviation");
  const ys = numericColumn(table, "hysteresis_recovery");
  const zs = numericColumn(table, "cumulative_amplification");
  const points = xs.map((x, k) => [x, ys[k], zs[k]]);
  return {
    option: {
      title: { text: `Pareto frontier (${points.length} configurations)` },
      xAxis: { type: "value", name: "negativity deviation" },
      yAxis: { type: "value", name: "hysteresis recovery" },
      visualMap: {
        dimension: 2,
        min: Math.min(...zs),
        max: Math.max(...zs),
        calculable: true,
        orient: "vertical", right: 0, top: "middle",
        inRange: { color: ["#50a3ba", "#eac736", "#d94e5d"] },
        text: ["cumulative amplification", ""],
      },
      series: [{ type: "scatter", symbolSize: 6, data: points }],
    },
    meta: { size: points.length },
  };
}

export const FIGURE_KINDS = [
  "trajectory", "ceiling", "reputation", "histogram", "heatmap", "pareto",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export function buildChart(kind: FigureKind, table: CsvTable, metric?: string): BuiltChart {
  switch (kind) {
    case "trajectory":
      return buildTrajectory(table);
    case "ceiling":
      return buildCeiling(table);
    case "reputation":
      return buildReputation(table);
    case "histogram":
      return buildHistogram(table, metric ?? "negativity_ratio");
    case "heatmap":
      return buildHeatmap(table);
    case "pareto":
      return buildPareto(table);
    default:
      throw new CsvError(`unknown figure kind '${kind satisfies never}'`);
  }
}

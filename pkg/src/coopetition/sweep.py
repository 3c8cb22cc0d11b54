"""Full factorial parameter sweep, distribution summaries, sensitivity, Pareto.

The default grid crosses five levels of each of the seven dynamics
parameters (5**7 = 78,125 configurations).  Because every metric depends
only on a subset of the parameters, the sweep evaluates each metric once
per distinct parameter class on numpy arrays and broadcasts the results
to the full grid; the result is bit-identical to evaluating
``metrics.evaluate_config`` per configuration, which the tests check.

Outputs follow fixed schemas: ``sweep_outcomes.csv`` (one row per
configuration), ``sweep_summary.json`` (per-metric distribution stats),
``sensitivity.csv`` (Pearson r per parameter/metric pair), and
``pareto.csv`` (non-dominated configurations with objective values).
Floats serialize with 9 significant digits.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from coopetition import metrics as M
from coopetition.metrics import ConfigOutcome, MetricProbeSpec
from coopetition.trust import TrustParams

PARAM_NAMES = ("lambda_plus", "lambda_minus", "mu_r", "delta_r", "xi", "rho", "kappa")

DEFAULT_LEVELS: dict[str, tuple[float, ...]] = {
    "lambda_plus": (0.05, 0.075, 0.10, 0.125, 0.15),
    "lambda_minus": (0.15, 0.225, 0.30, 0.375, 0.45),
    "mu_r": (0.5, 0.55, 0.6, 0.65, 0.7),
    "delta_r": (0.01, 0.02, 0.03, 0.04, 0.05),
    "xi": (0.3, 0.4, 0.5, 0.6, 0.7),
    "rho": (0.1, 0.15, 0.2, 0.25, 0.3),
    "kappa": (0.5, 0.75, 1.0, 1.25, 1.5),
}

SWEEP_DISCOUNT = 0.95  # fixed across configurations; not swept

# Ties in Pareto objectives are resolved at output precision (9 significant
# digits would be overkill; 12 decimals absorbs float noise in level ratios).
OBJECTIVE_DECIMALS = 12
NEGATIVITY_TARGET = 3.0


@dataclass(frozen=True)
class GridSpec:
    levels: dict[str, tuple[float, ...]] = field(
        default_factory=lambda: dict(DEFAULT_LEVELS))

    def __post_init__(self) -> None:
        for name in PARAM_NAMES:
            if name not in self.levels:
                raise ValueError(f"missing levels for {name}")
            values = self.levels[name]
            if not values:
                raise ValueError(f"{name}: level list must be nonempty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name}: levels must be strictly increasing")
        extra = set(self.levels) - set(PARAM_NAMES)
        if extra:
            raise ValueError(f"unknown parameters {sorted(extra)}")

    @property
    def size(self) -> int:
        return math.prod(len(self.levels[p]) for p in PARAM_NAMES)

    def shape(self) -> tuple[int, ...]:
        return tuple(len(self.levels[p]) for p in PARAM_NAMES)

    def params_for(self, config_id: int) -> TrustParams:
        """Configuration at a lexicographic id (id 0 = all minimum levels)."""
        if not 0 <= config_id < self.size:
            raise IndexError(f"config id {config_id} out of range")
        values = {}
        remainder = config_id
        for name in reversed(PARAM_NAMES):
            levels = self.levels[name]
            remainder, idx = divmod(remainder, len(levels))
            values[name] = levels[idx]
        return TrustParams(discount=SWEEP_DISCOUNT, **values)


def default_grid() -> GridSpec:
    return GridSpec()


def enumerate_grid(spec: GridSpec) -> Iterator[tuple[int, TrustParams]]:
    """Yield (id, params) in lexicographic order over the level lists."""
    for config_id in range(spec.size):
        yield config_id, spec.params_for(config_id)


@dataclass(frozen=True)
class SweepResult:
    """Dense sweep output: parameter columns and metric columns by config id."""

    spec: GridSpec
    params: dict[str, np.ndarray]          # name -> (N,) level values
    outcomes: dict[str, np.ndarray]        # metric -> (N,) values

    @property
    def size(self) -> int:
        return self.spec.size

    def outcome_for(self, config_id: int) -> ConfigOutcome:
        return ConfigOutcome(**{name: float(self.outcomes[name][config_id])
                                for name in ConfigOutcome.METRIC_NAMES})


def _level_index_columns(spec: GridSpec) -> dict[str, np.ndarray]:
    shape = spec.shape()
    grids = np.indices(shape).reshape(len(PARAM_NAMES), -1)
    return {name: grids[k] for k, name in enumerate(PARAM_NAMES)}


def run_sweep(spec: GridSpec | None = None,
              probe: MetricProbeSpec | None = None,
              threads: int | None = None) -> SweepResult:
    """Evaluate all seven metrics over the whole grid.

    ``threads`` is an advisory hint only: evaluation is a deterministic
    vectorized computation whose result does not depend on it.
    """
    spec = spec or default_grid()
    probe = probe or MetricProbeSpec()
    del threads

    idx = _level_index_columns(spec)
    cols = {name: np.asarray(spec.levels[name], dtype=float)[idx[name]]
            for name in PARAM_NAMES}

    def classed(metric_fn, *names):
        """Evaluate a metric on the distinct sub-grid of ``names`` and broadcast."""
        sub_shape = tuple(len(spec.levels[n]) for n in names)
        sub_idx = np.indices(sub_shape).reshape(len(names), -1)
        args = []
        for pos, name in enumerate(PARAM_NAMES):
            if name in names:
                levels = np.asarray(spec.levels[name], dtype=float)
                args.append(levels[sub_idx[names.index(name)]])
            else:
                args.append(np.asarray(spec.levels[name][0], dtype=float))
        values = metric_fn(tuple(args))
        # map class values back onto the full grid
        class_of = np.zeros(spec.size, dtype=np.int64)
        for name in names:
            class_of = class_of * len(spec.levels[name]) + idx[name]
        return np.asarray(values)[class_of]

    def fields_of(args):
        # metric functions receive (lp, lm, mu, dr, xi, kappa)
        lp, lm, mu, dr, xi, rho_unused, kappa = args
        return (lp, lm, mu, dr, xi, kappa)

    outcomes = {
        "negativity_ratio": classed(lambda a: M.negativity_ratio(fields_of(a)),
                                    "lambda_plus", "lambda_minus"),
        "hysteresis_recovery": classed(lambda a: M.hysteresis_recovery(fields_of(a), probe),
                                       "lambda_plus", "lambda_minus", "mu_r", "delta_r", "xi"),
        "cumulative_amplification": classed(lambda a: M.cumulative_amplification(fields_of(a), probe),
                                            "lambda_plus", "lambda_minus", "mu_r", "delta_r", "xi"),
        "dependency_amplification": classed(lambda a: M.dependency_amplification(fields_of(a), probe),
                                            "lambda_minus", "xi", "kappa"),
        "building_rate": classed(lambda a: M.building_rate(fields_of(a), probe),
                                 "lambda_plus"),
        "single_period_erosion": classed(lambda a: M.single_period_erosion(fields_of(a), probe),
                                         "lambda_minus", "xi", "kappa"),
        "time_to_half_recovery": classed(lambda a: M.time_to_half_recovery(fields_of(a), probe),
                                         "lambda_plus", "lambda_minus", "mu_r", "delta_r", "xi"),
    }
    return SweepResult(spec=spec, params=cols, outcomes=outcomes)


# ---------------------------------------------------------------------------
# Distribution summaries (Q1/Q3 by linear interpolation, population std)
# ---------------------------------------------------------------------------

SUMMARY_STATS = ("min", "q1", "median", "q3", "max", "mean", "std")


@dataclass(frozen=True)
class SweepSummary:
    stats: dict[str, dict[str, float]]   # metric -> stat name -> value

    def __post_init__(self) -> None:
        for metric, row in self.stats.items():
            if not row["min"] <= row["q1"] <= row["median"] <= row["q3"] <= row["max"]:
                raise ValueError(f"{metric}: quartiles out of order")


def summarize(outcomes: dict[str, np.ndarray] | SweepResult) -> SweepSummary:
    if isinstance(outcomes, SweepResult):
        outcomes = outcomes.outcomes
    stats = {}
    for metric, values in outcomes.items():
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("cannot summarize an empty outcome set")
        stats[metric] = {
            "min": float(values.min()),
            "q1": float(np.percentile(values, 25)),
            "median": float(np.percentile(values, 50)),
            "q3": float(np.percentile(values, 75)),
            "max": float(values.max()),
            "mean": float(values.mean()),
            "std": float(values.std()),
        }
    return SweepSummary(stats)


# ---------------------------------------------------------------------------
# Sensitivity: Pearson r of raw parameter levels against each metric
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SensitivityMatrix:
    correlations: dict[str, dict[str, float]]   # param -> metric -> r
    degenerate: tuple[tuple[str, str], ...]      # pairs with zero variance

    def r(self, param: str, metric: str) -> float:
        return self.correlations[param][metric]


def sensitivity(result: SweepResult) -> SensitivityMatrix:
    correlations: dict[str, dict[str, float]] = {}
    degenerate: list[tuple[str, str]] = []
    for pname in PARAM_NAMES:
        pvals = result.params[pname]
        p_sd = pvals.std()
        row = {}
        for metric, mvals in result.outcomes.items():
            m_sd = mvals.std()
            if p_sd == 0.0 or m_sd == 0.0:
                row[metric] = 0.0
                degenerate.append((pname, metric))
                continue
            cov = ((pvals - pvals.mean()) * (mvals - mvals.mean())).mean()
            r = cov / (p_sd * m_sd)
            if not -1.0 <= r <= 1.0:
                r = max(-1.0, min(1.0, r))
            row[metric] = float(r)
        correlations[pname] = row
    return SensitivityMatrix(correlations=correlations, degenerate=tuple(degenerate))


# ---------------------------------------------------------------------------
# Pareto frontier
#
# Objectives: minimize |negativity - 3.0|; maximize hysteresis recovery;
# maximize cumulative amplification subject to amplification > 1.  The
# third objective is maximized, not minimized: under these probes the
# amplification grows with the erosion rate, and maximization is what
# keeps repeated violations costly enough to deter.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoSet:
    ids: np.ndarray                # (k,) config ids, ascending
    objectives: np.ndarray         # (k, 3): neg deviation, hysteresis, cumulative

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, config_id: int) -> bool:
        return bool(np.isin(config_id, self.ids))


def pareto_objectives(result: SweepResult) -> np.ndarray:
    o1 = np.round(np.abs(result.outcomes["negativity_ratio"] - NEGATIVITY_TARGET),
                  OBJECTIVE_DECIMALS)
    o2 = np.round(result.outcomes["hysteresis_recovery"], OBJECTIVE_DECIMALS)
    o3 = np.round(result.outcomes["cumulative_amplification"], OBJECTIVE_DECIMALS)
    return np.column_stack([o1, o2, o3])


def pareto_frontier(result: SweepResult) -> ParetoSet:
    """All configurations not dominated on the three objectives."""
    if result.size == 0:
        raise ValueError("pareto_frontier needs a nonempty sweep")
    objs = pareto_objectives(result)
    feasible = objs[:, 2] > 1.0
    if not feasible.any():
        raise ValueError("no configuration satisfies cumulative amplification > 1")
    # collapse to unique objective triples: configurations with identical
    # objectives are mutually non-dominating
    uniq, inverse = np.unique(objs, axis=0, return_inverse=True)
    n = len(uniq)
    nondom = np.ones(n, dtype=bool)
    for k in range(n):
        d1, h2, c3 = uniq[k]
        dominated = ((uniq[:, 0] <= d1) & (uniq[:, 1] >= h2) & (uniq[:, 2] >= c3)
                     & ((uniq[:, 0] < d1) | (uniq[:, 1] > h2) | (uniq[:, 2] > c3)))
        if dominated.any():
            nondom[k] = False
    member = nondom[inverse] & feasible
    ids = np.flatnonzero(member)
    return ParetoSet(ids=ids, objectives=objs[ids])


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".9g")


OUTCOME_CSV_COLUMNS = ["id", *PARAM_NAMES, *ConfigOutcome.METRIC_NAMES]


def write_outcomes_csv(result: SweepResult, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(OUTCOME_CSV_COLUMNS)
    params = [result.params[p] for p in PARAM_NAMES]
    outcomes = [result.outcomes[m] for m in ConfigOutcome.METRIC_NAMES]
    for config_id in range(result.size):
        row = [str(config_id)]
        row += [_fmt(col[config_id]) for col in params]
        row += [_fmt(col[config_id]) for col in outcomes]
        writer.writerow(row)


def write_summary_json(summary: SweepSummary, handle) -> None:
    payload = {metric: {stat: float(_fmt(value)) for stat, value in row.items()}
               for metric, row in summary.stats.items()}
    json.dump(payload, handle, indent=2, sort_keys=True)
    handle.write("\n")


def write_sensitivity_csv(matrix: SensitivityMatrix, handle) -> None:
    metric_names = list(ConfigOutcome.METRIC_NAMES)
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["parameter", *metric_names, "degenerate"])
    for pname in PARAM_NAMES:
        flags = ";".join(m for (p, m) in matrix.degenerate if p == pname)
        writer.writerow([pname] + [_fmt(matrix.correlations[pname][m]) for m in metric_names]
                        + [flags])


PARETO_CSV_COLUMNS = ["id", *PARAM_NAMES,
                      "negativity_deviation", "hysteresis_recovery", "cumulative_amplification"]


def write_pareto_csv(result: SweepResult, frontier: ParetoSet, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(PARETO_CSV_COLUMNS)
    for row_idx, config_id in enumerate(frontier.ids):
        row = [str(int(config_id))]
        row += [_fmt(result.params[p][config_id]) for p in PARAM_NAMES]
        row += [_fmt(v) for v in frontier.objectives[row_idx]]
        writer.writerow(row)

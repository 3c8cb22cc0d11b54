"""Phase-structured scenario simulation with full trajectory recording.

A scenario is an ordered list of phases, each holding a constant per-actor
deviation from the cooperation baseline for some number of periods.
Signals are computed from the raw deviations (so a deviation below
-baseline keeps its full severity) while utilities use the realized
actions floored at zero, honoring the nonnegative action space.

Each trajectory record captures the pre-step state: the trust and
reputation under which that period's actions were chosen, the signals
those actions produced, and the utilities they earned.  The post-step
state after the last period is kept as ``final_state``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from coopetition.economy import EconomyParams, extended_utility, symmetric_economy
from coopetition.istar import Actor, InterdependenceMatrix
from coopetition.trust import (
    DyadState,
    SystemState,
    TrustParams,
    cooperation_signal,
    system_step,
    uniform_system_state,
)


@dataclass(frozen=True)
class PhaseSpec:
    """A named stretch of periods with constant per-actor deviations."""

    name: str
    duration: int
    deviation: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.duration < 1:
            raise ValueError(f"phase {self.name!r}: duration must be >= 1")
        if not all(math.isfinite(d) for d in self.deviation):
            raise ValueError(f"phase {self.name!r}: deviations must be finite")


@dataclass(frozen=True)
class Scenario:
    actors: tuple[Actor, ...]
    phases: tuple[PhaseSpec, ...]
    initial: SystemState
    trust_params: TrustParams
    econ: EconomyParams
    matrix: InterdependenceMatrix

    def __post_init__(self) -> None:
        ids = tuple(a.id for a in self.actors)
        if len(set(ids)) != len(ids):
            raise ValueError("actor ids must be unique")
        if not self.phases:
            raise ValueError("scenario needs at least one phase")
        for phase in self.phases:
            if len(phase.deviation) != len(ids):
                raise ValueError(f"phase {phase.name!r}: need one deviation per actor")
        if self.econ.n != len(ids):
            raise ValueError("economy size must match actor count")
        if tuple(self.matrix.actor_ids) != ids:
            raise ValueError("interdependence matrix actors must match scenario actors")
        if set(self.initial.dyads) != {(i, j) for i in ids for j in ids if i != j}:
            raise ValueError("initial state dyads must cover the scenario actors")

    def actor_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.actors)

    @property
    def total_duration(self) -> int:
        return sum(p.duration for p in self.phases)


@dataclass(frozen=True)
class PeriodRecord:
    """Everything observable in one period, taken against the pre-step state."""

    period: int
    phase: str
    actions: dict[str, float]          # realized (floored) actions
    signals: dict[tuple[str, str], float]
    trust: dict[tuple[str, str], float]
    reputation: dict[tuple[str, str], float]
    utilities: dict[str, float]


@dataclass(frozen=True)
class Trajectory:
    records: tuple[PeriodRecord, ...]
    final_state: SystemState
    actor_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.records)

    def phase_of(self, period: int) -> str:
        return self.records[period].phase

    def mean_trust(self, period: int) -> float:
        values = self.records[period].trust.values()
        return sum(values) / len(values)

    def mean_trust_series(self) -> list[float]:
        return [self.mean_trust(t) for t in range(len(self.records))]

    def final_mean_trust(self) -> float:
        values = [d.trust for d in self.final_state.dyads.values()]
        return sum(values) / len(values)

    def peak_reputation(self) -> float:
        peak = max(d.reputation_damage for d in self.final_state.dyads.values())
        for rec in self.records:
            peak = max(peak, max(rec.reputation.values()))
        return peak


def simulate(scenario: Scenario) -> Trajectory:
    """Run the scenario and record one entry per period."""
    ids = scenario.actor_ids()
    index = {a: k for k, a in enumerate(ids)}
    baselines = {a: scenario.econ.baselines[index[a]] for a in ids}
    dependence = scenario.matrix.pair_map()
    params = scenario.trust_params
    state = scenario.initial
    records = []
    period = 0
    for phase in scenario.phases:
        raw = {a: baselines[a] + phase.deviation[index[a]] for a in ids}
        floored = {a: max(0.0, raw[a]) for a in ids}
        for _ in range(phase.duration):
            signals = {
                (i, j): cooperation_signal(raw[j], baselines[j], params.kappa).value
                for (i, j) in state.dyads
            }
            action_vec = [floored[a] for a in ids]
            utilities = {}
            for a in ids:
                trust_row = [0.0] * len(ids)
                dep_row = [0.0] * len(ids)
                for b in ids:
                    if b != a:
                        trust_row[index[b]] = state.dyad(a, b).trust
                        dep_row[index[b]] = dependence[(a, b)]
                utilities[a] = extended_utility(index[a], action_vec, trust_row,
                                                dep_row, scenario.econ, params.rho)
            records.append(PeriodRecord(
                period=period,
                phase=phase.name,
                actions=dict(floored),
                signals=signals,
                trust={k: d.trust for k, d in state.dyads.items()},
                reputation={k: d.reputation_damage for k, d in state.dyads.items()},
                utilities=utilities,
            ))
            # signals use raw deviations; the state transition must match them
            state = system_step(state, raw, baselines, dependence, params)
            period += 1
    return Trajectory(records=tuple(records), final_state=state, actor_ids=ids)


# ---------------------------------------------------------------------------
# Renault-Nissan alliance, 1999-2025, quarterly periods
# ---------------------------------------------------------------------------

RENAULT_NISSAN_PARAMS = TrustParams(
    lambda_plus=0.10, lambda_minus=0.30, mu_r=0.60, delta_r=0.02,
    xi=0.50, rho=0.20, kappa=1.00, discount=0.95,
)

# Published interdependence coefficients (mature-phase structure).
D_NISSAN_ON_RENAULT = 0.51
D_RENAULT_ON_NISSAN = 0.655


def renault_nissan_scenario() -> Scenario:
    """The bundled 80-period alliance case study.

    Five phases: formation (+1.5, 12 periods), mature cooperation (+2.0,
    40), crisis (-3.0, 4), recovery efforts (+1.2, 15), and the current
    state (+1.5, 9 periods, filling out the 80-period horizon).  Both
    actors share each phase's deviation; trust starts at the moderate 0.5
    with pristine reputation.
    """
    actors = (Actor("renault", "Renault S.A."), Actor("nissan", "Nissan Motor Co."))
    phases = (
        PhaseSpec("formation", 12, (1.5, 1.5)),
        PhaseSpec("mature_cooperation", 40, (2.0, 2.0)),
        PhaseSpec("crisis", 4, (-3.0, -3.0)),
        PhaseSpec("recovery_efforts", 15, (1.2, 1.2)),
        PhaseSpec("current_state", 9, (1.5, 1.5)),
    )
    matrix = InterdependenceMatrix(
        actor_ids=("renault", "nissan"),
        entries=((0.0, D_RENAULT_ON_NISSAN), (D_NISSAN_ON_RENAULT, 0.0)),
    )
    return Scenario(
        actors=actors,
        phases=phases,
        initial=uniform_system_state(["renault", "nissan"], trust=0.5),
        trust_params=RENAULT_NISSAN_PARAMS,
        econ=symmetric_economy(2, gamma=1.0, endowment=0.0, baseline=1.0),
        matrix=matrix,
    )


# ---------------------------------------------------------------------------
# CSV export (9 significant digits, one row per period and dyad)
# ---------------------------------------------------------------------------

TRAJECTORY_COLUMNS = ["period", "phase", "observer", "partner",
                      "partner_action", "signal", "trust", "reputation_damage"]
UTILITY_COLUMNS = ["period", "phase", "actor", "action", "utility"]


def _fmt(x: float) -> str:
    return format(x, ".9g")


def write_trajectory_csv(trajectory: Trajectory, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(TRAJECTORY_COLUMNS)
    for rec in trajectory.records:
        for (i, j) in sorted(rec.trust):
            writer.writerow([
                rec.period, rec.phase, i, j,
                _fmt(rec.actions[j]), _fmt(rec.signals[(i, j)]),
                _fmt(rec.trust[(i, j)]), _fmt(rec.reputation[(i, j)]),
            ])


def write_utilities_csv(trajectory: Trajectory, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(UTILITY_COLUMNS)
    for rec in trajectory.records:
        for actor in trajectory.actor_ids:
            writer.writerow([
                rec.period, rec.phase, actor,
                _fmt(rec.actions[actor]), _fmt(rec.utilities[actor]),
            ])

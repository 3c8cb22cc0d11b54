"""Markov policies for the two-actor dynamic trust game via value iteration.

The joint state is the pair of dyad states ((T12, R12), (T21, R21))
discretized onto a grid.  Each sweep resolves the simultaneous-move stage
game by iterated best response (initialized at the most cooperative
action, capped, ties broken toward the smallest action) and backs up each
actor's value through the deterministic successor state, mapped to the
grid by nearest neighbor.  Infinite-horizon solves iterate to a sup-norm
tolerance; finite-horizon solves run exactly ``horizon`` backward steps.

State values within a sweep are independent array operations; sweeps are
sequential.  Everything is deterministic given the grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from coopetition.economy import EconomyParams
from coopetition.scenario import PeriodRecord, Trajectory
from coopetition.trust import DyadState, SystemState, TrustParams, system_step

BR_CAP = 50          # iterated best-response cap per sweep
DEFAULT_MAX_SWEEPS = 10_000
TIE_TOL = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, residual: float, sweeps: int):
        super().__init__(f"value iteration did not converge: residual {residual:.3e} "
                         f"after {sweeps} sweeps")
        self.residual = residual
        self.sweeps = sweeps


def _default_trust_levels() -> tuple[float, ...]:
    return tuple(np.linspace(0.0, 1.0, 21))


def _default_rep_levels() -> tuple[float, ...]:
    return tuple(np.linspace(0.0, 1.0, 11))


def _default_actions() -> tuple[float, ...]:
    return tuple(np.arange(0.0, 3.0 + 1e-9, 0.25))


@dataclass(frozen=True)
class StateGrid:
    trust_levels: tuple[float, ...] = field(default_factory=_default_trust_levels)
    reputation_levels: tuple[float, ...] = field(default_factory=_default_rep_levels)
    action_levels: tuple[float, ...] = field(default_factory=_default_actions)

    def __post_init__(self) -> None:
        for name in ("trust_levels", "reputation_levels", "action_levels"):
            values = getattr(self, name)
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        for name in ("trust_levels", "reputation_levels"):
            values = getattr(self, name)
            if values[0] != 0.0 or values[-1] != 1.0:
                raise ValueError(f"{name} must include endpoints 0 and 1")
        if any(a < 0 for a in self.action_levels):
            raise ValueError("action levels must be nonnegative")

    @property
    def n_dyad(self) -> int:
        return len(self.trust_levels) * len(self.reputation_levels)

    def dyad_index(self, trust: float, rep: float) -> int:
        ti = int(np.argmin(np.abs(np.asarray(self.trust_levels) - trust)))
        ri = int(np.argmin(np.abs(np.asarray(self.reputation_levels) - rep)))
        return ti * len(self.reputation_levels) + ri

    def dyad_values(self, index: int) -> tuple[float, float]:
        n_rep = len(self.reputation_levels)
        return self.trust_levels[index // n_rep], self.reputation_levels[index % n_rep]


@dataclass(frozen=True)
class ValueFunction:
    grid: StateGrid
    values: tuple[np.ndarray, np.ndarray]   # per actor, shape (n_dyad, n_dyad)
    residuals: tuple[float, ...] = ()        # sup-norm change per sweep

    def value(self, actor: int, d12: int, d21: int) -> float:
        return float(self.values[actor][d12, d21])


@dataclass(frozen=True)
class Policy:
    grid: StateGrid
    choices: tuple[np.ndarray, np.ndarray]   # per actor, action indices

    def action(self, actor: int, d12: int, d21: int) -> float:
        return self.grid.action_levels[int(self.choices[actor][d12, d21])]

    def action_for_states(self, actor: int, dyad_12: DyadState, dyad_21: DyadState) -> float:
        d12 = self.grid.dyad_index(dyad_12.trust, dyad_12.reputation_damage)
        d21 = self.grid.dyad_index(dyad_21.trust, dyad_21.reputation_damage)
        return self.action(actor, d12, d21)


def static_best_response(actor: int, others_actions: list[float], trust_row: list[float],
                         dependence_row: list[float], econ: EconomyParams,
                         params: TrustParams,
                         action_levels: tuple[float, ...] | None = None) -> float:
    """Exhaustive stage-utility argmax over the action grid; ties go low."""
    from coopetition.economy import extended_utility

    action_levels = action_levels or _default_actions()
    profile = list(others_actions)
    if len(profile) == econ.n - 1:
        profile.insert(actor, 0.0)
    if len(profile) != econ.n:
        raise ValueError("others_actions must hold the other actors' actions")
    best_action, best_utility = action_levels[0], -np.inf
    for a in action_levels:
        profile[actor] = a
        utility = extended_utility(actor, profile, trust_row, dependence_row,
                                   econ, params.rho)
        if utility > best_utility + TIE_TOL:
            best_action, best_utility = a, utility
    return best_action


@dataclass(frozen=True)
class _StageTables:
    """Precomputed per-action-pair stage utilities and successor indices."""

    u1: np.ndarray        # (nA, nA) trust-independent part for actor 1
    u2: np.ndarray
    rec1: np.ndarray      # (nA, nA) reciprocity coefficient (times T12)
    rec2: np.ndarray
    succ12: np.ndarray    # (n_dyad, nA): dyad 12 successor under partner action
    succ21: np.ndarray


def _build_tables(grid: StateGrid, econ: EconomyParams, params: TrustParams,
                  d12: float, d21: float) -> _StageTables:
    from coopetition.economy import individual_value, synergy

    actions = np.asarray(grid.action_levels)
    nA = len(actions)
    a1, a2 = np.meshgrid(actions, actions, indexing="ij")
    f1 = np.asarray([[individual_value(x, econ) for x in row] for row in a1])
    f2 = np.asarray([[individual_value(x, econ) for x in row] for row in a2])
    g = np.asarray([[synergy((x, y), econ) for x, y in zip(r1, r2)]
                    for r1, r2 in zip(a1, a2)])
    pi1 = econ.endowments[0] - a1 + f1 + econ.shares[0] * econ.gamma * g
    pi2 = econ.endowments[1] - a2 + f2 + econ.shares[1] * econ.gamma * g
    u1 = pi1 + d12 * pi2
    u2 = pi2 + d21 * pi1
    rec1 = params.rho * (a2 - econ.baselines[1]) * a1
    rec2 = params.rho * (a1 - econ.baselines[0]) * a2

    n_trust = len(grid.trust_levels)
    n_rep = len(grid.reputation_levels)
    trust_v = np.repeat(np.asarray(grid.trust_levels), n_rep)
    rep_v = np.tile(np.asarray(grid.reputation_levels), n_trust)
    tgrid = np.asarray(grid.trust_levels)
    rgrid = np.asarray(grid.reputation_levels)

    def successors(dep: float, baseline: float) -> np.ndarray:
        succ = np.empty((grid.n_dyad, nA), dtype=np.int64)
        for k, a in enumerate(actions):
            s = np.tanh(params.kappa * (a - baseline))
            if s > 0:
                t_next = trust_v + params.lambda_plus * s * (1 - trust_v) * (1 - rep_v)
                r_next = rep_v - params.delta_r * rep_v
            else:
                t_next = trust_v + params.lambda_minus * s * trust_v * (1 + params.xi * dep)
                r_next = rep_v + params.mu_r * (-s) * (1 - rep_v) - params.delta_r * rep_v
            t_next = np.clip(t_next, 0.0, 1.0)
            r_next = np.clip(r_next, 0.0, 1.0)
            ti = np.argmin(np.abs(t_next[:, None] - tgrid[None, :]), axis=1)
            ri = np.argmin(np.abs(r_next[:, None] - rgrid[None, :]), axis=1)
            succ[:, k] = ti * n_rep + ri
        return succ

    return _StageTables(u1=u1, u2=u2, rec1=rec1, rec2=rec2,
                        succ12=successors(d12, econ.baselines[1]),
                        succ21=successors(d21, econ.baselines[0]))


def _argmax_smallest(q: np.ndarray) -> np.ndarray:
    """Argmax over axis 0 with ties (within TIE_TOL) broken to the lowest index."""
    best = q.max(axis=0)
    is_best = q >= best - TIE_TOL
    return is_best.argmax(axis=0)


def value_iteration(grid: StateGrid, econ: EconomyParams, params: TrustParams,
                    d12: float, d21: float, horizon: int | str = "infinite",
                    tolerance: float = 1e-6, max_sweeps: int = DEFAULT_MAX_SWEEPS,
                    discount: float | None = None) -> tuple[ValueFunction, Policy]:
    """Solve for Markov policies of the two-actor trust game.

    ``horizon`` is either a positive integer (finite backward induction)
    or "infinite" (iterate until the sup-norm residual drops below
    ``tolerance``; requires discount < 1, raises ConvergenceError at the
    sweep cap).  ``discount`` overrides params.discount when given, which
    admits the exactly-myopic solve (discount 0) that TrustParams itself
    excludes.
    """
    if econ.n != 2:
        raise ValueError("equilibrium computation supports exactly 2 actors")
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    infinite = horizon == "infinite"
    if not infinite and (not isinstance(horizon, int) or horizon < 1):
        raise ValueError("horizon must be a positive integer or 'infinite'")
    beta = params.discount if discount is None else discount
    if not 0.0 <= beta < 1.0 and infinite:
        raise ValueError("infinite horizon requires discount < 1")

    tables = _build_tables(grid, econ, params, d12, d21)
    n = grid.n_dyad
    nA = len(grid.action_levels)
    d12g, d21g = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    n_rep = len(grid.reputation_levels)
    t12v = np.asarray(grid.trust_levels)[d12g // n_rep]
    t21v = np.asarray(grid.trust_levels)[d21g // n_rep]

    v1 = np.zeros((n, n))
    v2 = np.zeros((n, n))
    pol1 = np.zeros((n, n), dtype=np.int64)
    pol2 = np.zeros((n, n), dtype=np.int64)

    sweeps = horizon if not infinite else max_sweeps
    residual = np.inf
    history: list[float] = []
    for sweep in range(sweeps):
        a1 = np.full((n, n), nA - 1, dtype=np.int64)
        a2 = np.full((n, n), nA - 1, dtype=np.int64)
        for _ in range(BR_CAP):
            q1 = np.empty((nA, n, n))
            for k in range(nA):
                q1[k] = (tables.u1[k, a2] + tables.rec1[k, a2] * t12v
                         + beta * v1[tables.succ12[d12g, a2], tables.succ21[d21g, k]])
            new_a1 = _argmax_smallest(q1)
            q2 = np.empty((nA, n, n))
            for k in range(nA):
                q2[k] = (tables.u2[new_a1, k] + tables.rec2[new_a1, k] * t21v
                         + beta * v2[tables.succ12[d12g, k], tables.succ21[d21g, new_a1]])
            new_a2 = _argmax_smallest(q2)
            if np.array_equal(new_a1, a1) and np.array_equal(new_a2, a2):
                break
            a1, a2 = new_a1, new_a2
        succ12 = tables.succ12[d12g, a2]
        succ21 = tables.succ21[d21g, a1]
        new_v1 = tables.u1[a1, a2] + tables.rec1[a1, a2] * t12v + beta * v1[succ12, succ21]
        new_v2 = tables.u2[a1, a2] + tables.rec2[a1, a2] * t21v + beta * v2[succ12, succ21]
        residual = max(float(np.abs(new_v1 - v1).max()), float(np.abs(new_v2 - v2).max()))
        history.append(residual)
        v1, v2, pol1, pol2 = new_v1, new_v2, a1, a2
        if infinite and residual < tolerance:
            break
    else:
        if infinite:
            raise ConvergenceError(residual, max_sweeps)

    return (ValueFunction(grid=grid, values=(v1, v2), residuals=tuple(history)),
            Policy(grid=grid, choices=(pol1, pol2)))


def simulate_equilibrium_path(policy: Policy, initial: SystemState, periods: int,
                              econ: EconomyParams, params: TrustParams,
                              dependence: dict[tuple[str, str], float]) -> Trajectory:
    """Closed-loop rollout: each period both actors play the policy."""
    from coopetition.economy import extended_utility

    ids = initial.actor_ids()
    if len(ids) != 2:
        raise ValueError("equilibrium paths support exactly 2 actors")
    first, second = ids
    state = initial
    records = []
    for t in range(periods):
        d12 = state.dyad(first, second)
        d21 = state.dyad(second, first)
        actions = {
            first: policy.action_for_states(0, d12, d21),
            second: policy.action_for_states(1, d12, d21),
        }
        profile = [actions[first], actions[second]]
        utilities = {}
        for pos, actor in enumerate(ids):
            other = ids[1 - pos]
            trust_row = [0.0, 0.0]
            trust_row[1 - pos] = state.dyad(actor, other).trust
            dep_row = [0.0, 0.0]
            dep_row[1 - pos] = dependence[(actor, other)]
            utilities[actor] = extended_utility(pos, profile, trust_row, dep_row,
                                                econ, params.rho)
        baselines = {first: econ.baselines[0], second: econ.baselines[1]}
        signals = {}
        for (i, j) in state.dyads:
            signals[(i, j)] = float(np.tanh(params.kappa * (actions[j] - baselines[j])))
        records.append(PeriodRecord(
            period=t, phase="policy", actions=dict(actions), signals=signals,
            trust={k: d.trust for k, d in state.dyads.items()},
            reputation={k: d.reputation_damage for k, d in state.dyads.items()},
            utilities=utilities,
        ))
        state = system_step(state, actions, baselines, dependence, params)
    return Trajectory(records=tuple(records), final_state=state, actor_ids=ids)


def write_policy_csv(policy: Policy, handle) -> None:
    """Policy actions keyed by grid indices for both actors."""
    grid = policy.grid
    n_rep = len(grid.reputation_levels)
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["t12_index", "r12_index", "t21_index", "r21_index",
                     "action_1", "action_2"])
    n = grid.n_dyad
    for d12 in range(n):
        for d21 in range(n):
            writer.writerow([
                d12 // n_rep, d12 % n_rep, d21 // n_rep, d21 % n_rep,
                format(policy.action(0, d12, d21), ".9g"),
                format(policy.action(1, d12, d21), ".9g"),
            ])


def write_value_csv(value: ValueFunction, handle) -> None:
    grid = value.grid
    n_rep = len(grid.reputation_levels)
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["t12_index", "r12_index", "t21_index", "r21_index",
                     "value_1", "value_2"])
    n = grid.n_dyad
    for d12 in range(n):
        for d21 in range(n):
            writer.writerow([
                d12 // n_rep, d12 % n_rep, d21 // n_rep, d21 % n_rep,
                format(value.value(0, d12, d21), ".9g"),
                format(value.value(1, d12, d21), ".9g"),
            ])

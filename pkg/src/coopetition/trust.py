"""Two-layer trust state and its update equations.

Each ordered pair of actors (i, j) carries an immediate-trust level T in
[0, 1] and a reputation-damage level R in [0, 1].  A bounded cooperation
signal s = tanh(kappa * (action - baseline)) drives both layers:

  * trust builds at rate lambda_plus, attenuated by the remaining headroom
    (1 - T) and by the reputation ceiling (1 - R);
  * trust erodes at rate lambda_minus, proportional to current trust and
    amplified by structural dependency through (1 + xi * D);
  * reputation damage accumulates on violations (s < 0) proportional to
    severity and remaining damage space, and decays by delta_r each period.

All updates within a period are simultaneous: every delta is evaluated
against the pre-step state.  States are immutable values; every function
here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

# Tolerance for the saturation guard: the update algebra keeps T and R in
# [0, 1] on its own, so any excursion beyond this is a model error, not
# floating-point noise.
BOUND_TOL = 1e-12


class ModelInvariantError(RuntimeError):
    """A state update left the unit interval by more than BOUND_TOL."""


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must be strictly inside (0, 1), got {value}")


@dataclass(frozen=True)
class TrustParams:
    """The seven swept dynamics parameters plus the per-period discount."""

    lambda_plus: float    # trust building learning rate, (0, 1)
    lambda_minus: float   # trust erosion learning rate, (0, 1)
    mu_r: float           # reputation damage severity, (0, 1)
    delta_r: float        # reputation decay rate, (0, 1)
    xi: float             # interdependence amplification, [0, 1]
    rho: float            # reciprocity strength, >= 0
    kappa: float          # signal sensitivity, > 0
    discount: float = 0.95  # per-period discount factor, (0, 1)

    def __post_init__(self) -> None:
        _check_open_unit("lambda_plus", self.lambda_plus)
        _check_open_unit("lambda_minus", self.lambda_minus)
        _check_open_unit("mu_r", self.mu_r)
        _check_open_unit("delta_r", self.delta_r)
        _check_unit("xi", self.xi)
        if self.rho < 0:
            raise ValueError(f"rho must be nonnegative, got {self.rho}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        _check_open_unit("discount", self.discount)
        for name in ("lambda_plus", "lambda_minus", "mu_r", "delta_r",
                     "xi", "rho", "kappa", "discount"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def negativity_ratio(self) -> float:
        return self.lambda_minus / self.lambda_plus


@dataclass(frozen=True)
class DyadState:
    """Immediate trust and reputation damage for one ordered actor pair."""

    trust: float = 0.5
    reputation_damage: float = 0.0

    def __post_init__(self) -> None:
        _check_unit("trust", self.trust)
        _check_unit("reputation_damage", self.reputation_damage)

    @property
    def ceiling(self) -> float:
        """Trust growth attenuation factor 1 - R."""
        return 1.0 - self.reputation_damage


@dataclass(frozen=True)
class CooperationSignal:
    """Bounded assessment of behavior relative to a baseline, in (-1, 1)."""

    value: float

    def __post_init__(self) -> None:
        if not -1.0 < self.value < 1.0:
            raise ValueError(f"signal must be strictly inside (-1, 1), got {self.value}")


def cooperation_signal(action: float, baseline: float, kappa: float) -> CooperationSignal:
    """Map an observed action to a bounded cooperation signal.

    Returns tanh(kappa * (action - baseline)): positive when the partner
    exceeds the normative baseline, negative when it falls short, with
    diminishing sensitivity to extreme deviations.
    """
    if not (math.isfinite(action) and math.isfinite(baseline) and math.isfinite(kappa)):
        raise ValueError("cooperation_signal requires finite inputs")
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    value = math.tanh(kappa * (action - baseline))
    # float tanh saturates to exactly +/-1 for |x| >~ 19; nudge inside the
    # open interval so the strict bound survives extreme deviations
    inside = math.nextafter(1.0, 0.0)
    return CooperationSignal(min(max(value, -inside), inside))


def trust_delta(state: DyadState, signal: CooperationSignal, d_ij: float,
                params: TrustParams) -> float:
    """Per-period trust change under the asymmetric update rule.

    Building (s > 0):  lambda_plus * s * (1 - T) * (1 - R)
    Erosion  (s <= 0): lambda_minus * s * T * (1 + xi * D_ij)
    """
    _check_unit("d_ij", d_ij)
    s = signal.value
    if s > 0:
        return params.lambda_plus * s * (1.0 - state.trust) * state.ceiling
    return params.lambda_minus * s * state.trust * (1.0 + params.xi * d_ij)


def reputation_step(state: DyadState, signal: CooperationSignal,
                    params: TrustParams) -> float:
    """Next-period reputation damage: violation accrual plus decay."""
    s = signal.value
    accrual = params.mu_r * (-s) * (1.0 - state.reputation_damage) if s < 0 else 0.0
    return state.reputation_damage + accrual - params.delta_r * state.reputation_damage


def _guard(name: str, value: float) -> float:
    if value < -BOUND_TOL or value > 1.0 + BOUND_TOL:
        raise ModelInvariantError(f"{name}={value!r} left [0, 1] beyond tolerance")
    return min(max(value, 0.0), 1.0)


def dyad_step(state: DyadState, partner_action: float, baseline: float,
              d_ij: float, params: TrustParams) -> DyadState:
    """Advance one dyad by one period.

    The signal is computed from the partner's action, then the trust and
    reputation updates are both applied against the pre-step state.
    """
    signal = cooperation_signal(partner_action, baseline, params.kappa)
    new_trust = state.trust + trust_delta(state, signal, d_ij, params)
    new_rep = reputation_step(state, signal, params)
    return DyadState(_guard("trust", new_trust), _guard("reputation_damage", new_rep))


@dataclass(frozen=True)
class SystemState:
    """All dyad states at one time index.

    ``dyads`` maps each ordered pair of distinct actor ids (observer,
    partner) to its DyadState; the diagonal is absent.
    """

    dyads: Mapping[tuple[str, str], DyadState]
    period: int = 0

    def __post_init__(self) -> None:
        actors = self.actor_ids()
        if self.period < 0:
            raise ValueError("period must be nonnegative")
        for (i, j) in self.dyads:
            if i == j:
                raise ValueError(f"diagonal dyad ({i}, {i}) not allowed")
        expected = {(i, j) for i in actors for j in actors if i != j}
        if set(self.dyads) != expected:
            missing = expected - set(self.dyads)
            raise ValueError(f"every ordered actor pair needs a dyad; missing {sorted(missing)}")

    def actor_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for (i, j) in self.dyads:
            seen.setdefault(i)
            seen.setdefault(j)
        return tuple(seen)

    def dyad(self, observer: str, partner: str) -> DyadState:
        return self.dyads[(observer, partner)]


def uniform_system_state(actor_ids: list[str] | tuple[str, ...], trust: float = 0.5,
                         reputation_damage: float = 0.0, period: int = 0) -> SystemState:
    """SystemState with the same initial DyadState on every ordered pair."""
    dyad = DyadState(trust, reputation_damage)
    return SystemState(
        dyads={(i, j): dyad for i in actor_ids for j in actor_ids if i != j},
        period=period,
    )


def system_step(state: SystemState, actions: Mapping[str, float],
                baselines: Mapping[str, float],
                dependence: Mapping[tuple[str, str], float],
                params: TrustParams) -> SystemState:
    """Advance every dyad simultaneously by one period.

    Dyad (i, j) observes actor j's action against actor j's baseline and
    is amplified by D_ij, actor i's structural dependence on j.  All dyads
    read the same pre-step state.
    """
    for actor in state.actor_ids():
        if actor not in actions:
            raise ValueError(f"no action supplied for actor {actor!r}")
        if actor not in baselines:
            raise ValueError(f"no baseline supplied for actor {actor!r}")
    new_dyads = {}
    for (i, j), dyad in state.dyads.items():
        if (i, j) not in dependence:
            raise ValueError(f"dependence entry missing for pair ({i!r}, {j!r})")
        new_dyads[(i, j)] = dyad_step(dyad, actions[j], baselines[j],
                                      dependence[(i, j)], params)
    return SystemState(dyads=new_dyads, period=state.period + 1)

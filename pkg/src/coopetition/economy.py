"""Value creation, private payoffs, and dependency/trust-augmented utility.

Total value combines individual contributions f_i(a_i) with a synergy term
gamma * geometric-mean(a).  Private payoffs subtract investment cost,
return the individual value, and split the synergy surplus by negotiated
shares.  The base utility adds each partner's payoff weighted by the
structural dependency on them; the extended utility adds trust-gated
reciprocity rewards for matching above-baseline cooperation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

VARIANTS = ("power", "logarithmic")

SHARE_TOL = 1e-9


@dataclass(frozen=True)
class EconomyParams:
    n: int
    shares: tuple[float, ...]
    endowments: tuple[float, ...]
    baselines: tuple[float, ...]
    beta_exponent: float = 0.75   # power variant: f(a) = a**beta
    theta: float = 1.0            # logarithmic variant: f(a) = theta*ln(1+a)
    variant: str = "power"
    gamma: float = 1.0            # synergy scale, >= 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        for name in ("shares", "endowments", "baselines"):
            if len(getattr(self, name)) != self.n:
                raise ValueError(f"{name} must have length n={self.n}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0.0 < self.beta_exponent < 1.0:
            raise ValueError("beta_exponent must be in (0, 1)")
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if any(not 0.0 <= s <= 1.0 for s in self.shares):
            raise ValueError("shares must be in [0, 1]")
        if abs(sum(self.shares) - 1.0) > SHARE_TOL:
            raise ValueError(f"shares must sum to 1, got {sum(self.shares)}")
        if any(e < 0 for e in self.endowments):
            raise ValueError("endowments must be nonnegative")


def symmetric_economy(n: int, gamma: float = 1.0, endowment: float = 0.0,
                      baseline: float = 1.0, **kwargs) -> EconomyParams:
    """Equal shares, identical endowments and baselines for all actors."""
    return EconomyParams(
        n=n,
        shares=(1.0 / n,) * n,
        endowments=(endowment,) * n,
        baselines=(baseline,) * n,
        gamma=gamma,
        **kwargs,
    )


def _check_profile(actions: Sequence[float], econ: EconomyParams) -> None:
    if len(actions) != econ.n:
        raise ValueError(f"action profile must have length n={econ.n}")
    if any(a < 0 for a in actions):
        raise ValueError("actions must be nonnegative")


def individual_value(action: float, econ: EconomyParams) -> float:
    """Individual contribution f(a) under the configured variant."""
    if econ.variant == "power":
        return action ** econ.beta_exponent
    return econ.theta * math.log1p(action)


def synergy(actions: Sequence[float], econ: EconomyParams) -> float:
    """Geometric-mean complementarity term; zero if any action is zero."""
    prod = 1.0
    for a in actions:
        prod *= a
    return prod ** (1.0 / econ.n)


def value_creation(actions: Sequence[float], econ: EconomyParams) -> float:
    """Total value V = sum of f_i(a_i) plus gamma times the synergy term."""
    _check_profile(actions, econ)
    return sum(individual_value(a, econ) for a in actions) + econ.gamma * synergy(actions, econ)


def private_payoff(actor: int, actions: Sequence[float], econ: EconomyParams) -> float:
    """pi_i = e_i - a_i + f_i(a_i) + alpha_i * (V - sum_j f_j(a_j))."""
    _check_profile(actions, econ)
    surplus = econ.gamma * synergy(actions, econ)
    return (econ.endowments[actor] - actions[actor]
            + individual_value(actions[actor], econ)
            + econ.shares[actor] * surplus)


def base_utility(actor: int, actions: Sequence[float],
                 dependence_row: Sequence[float], econ: EconomyParams) -> float:
    """U_base = own payoff plus dependency-weighted partner payoffs.

    ``dependence_row`` holds D_ij for j = 0..n-1 (own entry ignored).
    """
    _check_profile(actions, econ)
    if len(dependence_row) != econ.n:
        raise ValueError(f"dependence row must have length n={econ.n}")
    total = private_payoff(actor, actions, econ)
    for j in range(econ.n):
        if j != actor:
            total += dependence_row[j] * private_payoff(j, actions, econ)
    return total


def extended_utility(actor: int, actions: Sequence[float],
                     trust_row: Sequence[float], dependence_row: Sequence[float],
                     econ: EconomyParams, rho: float,
                     bounded_reciprocity: bool = False,
                     kappa: float = 1.0) -> float:
    """Base utility plus trust-gated reciprocity terms.

    Adds rho * T_ij * (a_j - baseline_j) * a_i for every partner j.  With
    ``bounded_reciprocity`` the partner deviation is squashed through
    tanh(kappa * deviation) instead of entering raw.
    """
    _check_profile(actions, econ)
    if len(trust_row) != econ.n:
        raise ValueError(f"trust row must have length n={econ.n}")
    if any(not 0.0 <= t <= 1.0 for j, t in enumerate(trust_row) if j != actor):
        raise ValueError("trust values must be in [0, 1]")
    total = base_utility(actor, actions, dependence_row, econ)
    for j in range(econ.n):
        if j == actor:
            continue
        deviation = actions[j] - econ.baselines[j]
        if bounded_reciprocity:
            deviation = math.tanh(kappa * deviation)
        total += rho * trust_row[j] * deviation * actions[actor]
    return total

"""Outcome metrics computed from standardized dyad probes.

Seven metrics summarize what a parameter configuration implies for trust
dynamics: the negativity ratio, dependency amplification, trust building
rate, single-period erosion, hysteresis recovery, cumulative damage
amplification, and time to 50% recovery.

Probe conventions.  Every probe that feeds the sensitivity and Pareto
analyses runs with a standardized signal sensitivity (kappa = 1) so the
metrics isolate the learning/reputation machinery; the single-period
erosion probe keeps the configuration's own kappa since its closed form
is defined in terms of it, and dependency amplification is kappa-free by
construction.  Violation probes start from a standardized post-build
state (trust 0.85, pristine reputation) rather than a simulated build:
a simulated build would entangle the pre-violation level with the
building rate and cap recovery ratios at 1/T_pre, inverting the
documented relationships.  The probe functions accept numpy arrays in
any parameter slot and broadcast, which is what the factorial sweep
exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coopetition.trust import TrustParams


@dataclass(frozen=True)
class MetricProbeSpec:
    """Standardized probe scenario settings shared across configurations."""

    build_periods: int = 10            # building-rate measurement window
    recovery_window: int = 35          # hysteresis recovery horizon
    severe_deviation: float = -3.0     # severe violation (per period)
    moderate_deviation: float = -1.5   # moderate violation
    cooperation_deviation: float = 1.0
    small_violation_count: int = 5
    small_deviation: float = -0.6      # count * small = severe equivalence
    d_high: float = 0.8
    d_low: float = 0.2
    d_mid: float = 0.5                 # dependency level for non-dependency probes
    initial_trust: float = 0.5         # building probe start
    initial_reputation: float = 0.0
    post_build_trust: float = 0.85     # standardized pre-violation state
    signal_sensitivity: float = 1.0    # probe kappa for standardized probes
    crisis_periods: int = 2            # severe periods before recovery timing
    recovery_cap: int = 200            # search window for time-to-half

    def __post_init__(self) -> None:
        if self.build_periods < 1 or self.recovery_window < 1 or self.crisis_periods < 1:
            raise ValueError("probe durations must be positive")
        if not self.d_high > self.d_low:
            raise ValueError("d_high must exceed d_low")
        if self.small_violation_count < 1:
            raise ValueError("small_violation_count must be >= 1")


@dataclass(frozen=True)
class ConfigOutcome:
    negativity_ratio: float
    hysteresis_recovery: float
    cumulative_amplification: float
    dependency_amplification: float
    building_rate: float
    single_period_erosion: float
    time_to_half_recovery: float

    METRIC_NAMES = (
        "negativity_ratio", "hysteresis_recovery", "cumulative_amplification",
        "dependency_amplification", "building_rate", "single_period_erosion",
        "time_to_half_recovery",
    )

    def __post_init__(self) -> None:
        for name in self.METRIC_NAMES:
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.negativity_ratio > 0:
            raise ValueError("negativity_ratio must be positive")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in self.METRIC_NAMES)


# ---------------------------------------------------------------------------
# Array-friendly dyad stepping.  Mirrors trust.dyad_step exactly (tested
# against it) but accepts numpy arrays in any slot.
# ---------------------------------------------------------------------------

def probe_step(trust, rep, deviation, kappa, lam_plus, lam_minus, mu_r,
               delta_r, xi, dependence):
    s = np.tanh(kappa * deviation)
    delta = np.where(
        s > 0,
        lam_plus * s * (1.0 - trust) * (1.0 - rep),
        lam_minus * s * trust * (1.0 + xi * dependence),
    )
    accrual = np.where(s < 0, mu_r * (-s) * (1.0 - rep), 0.0)
    return trust + delta, rep + accrual - delta_r * rep


def _fields(params):
    """(lambda_plus, lambda_minus, mu_r, delta_r, xi, kappa) as arrays/floats."""
    if isinstance(params, TrustParams):
        return (params.lambda_plus, params.lambda_minus, params.mu_r,
                params.delta_r, params.xi, params.kappa)
    return params  # already a tuple of array-likes


# ---------------------------------------------------------------------------
# The seven metrics
# ---------------------------------------------------------------------------

def negativity_ratio(params) -> float:
    lp, lm, *_ = _fields(params)
    return lm / lp


def dependency_amplification(params, probe: MetricProbeSpec = MetricProbeSpec()):
    """Erosion-speed ratio at high vs low structural dependency.

    One severe violation from identical pre-violation states; reduces
    algebraically to (1 + xi*d_high) / (1 + xi*d_low), so the config's own
    kappa cancels.
    """
    lp, lm, mu, dr, xi, kappa = _fields(params)
    t0 = probe.post_build_trust + 0.0 * np.asarray(lm)
    r0 = probe.initial_reputation
    t_high, _ = probe_step(t0, r0, probe.severe_deviation, kappa, lp, lm, mu, dr, xi, probe.d_high)
    t_low, _ = probe_step(t0, r0, probe.severe_deviation, kappa, lp, lm, mu, dr, xi, probe.d_low)
    return (t0 - t_high) / (t0 - t_low)


def dependency_amplification_closed_form(params, probe: MetricProbeSpec = MetricProbeSpec()):
    _, _, _, _, xi, _ = _fields(params)
    return (1.0 + xi * probe.d_high) / (1.0 + xi * probe.d_low)


def building_rate(params, probe: MetricProbeSpec = MetricProbeSpec()):
    """Average per-period trust increase under sustained cooperation."""
    lp, lm, mu, dr, xi, _ = _fields(params)
    trust = probe.initial_trust + 0.0 * np.asarray(lp)
    rep = probe.initial_reputation
    for _ in range(probe.build_periods):
        trust, rep = probe_step(trust, rep, probe.cooperation_deviation,
                                probe.signal_sensitivity, lp, lm, mu, dr, xi, probe.d_mid)
    return (trust - probe.initial_trust) / probe.build_periods


def single_period_erosion(params, probe: MetricProbeSpec = MetricProbeSpec()):
    """Trust lost to one moderate violation at the post-build trust level.

    Equals lambda_minus * |tanh(kappa * moderate_deviation)| * T_pre *
    (1 + xi * d_mid); computed by simulation, with the closed form kept as
    an independent check.
    """
    lp, lm, mu, dr, xi, kappa = _fields(params)
    t0 = probe.post_build_trust + 0.0 * np.asarray(lm)
    trust, _ = probe_step(t0, probe.initial_reputation, probe.moderate_deviation,
                          kappa, lp, lm, mu, dr, xi, probe.d_mid)
    return t0 - trust


def single_period_erosion_closed_form(params, probe: MetricProbeSpec = MetricProbeSpec()):
    _, lm, _, _, xi, kappa = _fields(params)
    s = np.tanh(kappa * (-probe.moderate_deviation))
    return lm * s * probe.post_build_trust * (1.0 + xi * probe.d_mid)


def hysteresis_recovery(params, probe: MetricProbeSpec = MetricProbeSpec()):
    """Max trust reached within the recovery window over the pre-violation level.

    One severe violation from the standardized post-build state, then
    sustained cooperation; values below 1 mean the reputation ceiling kept
    trust under its pre-violation level for the whole window.
    """
    lp, lm, mu, dr, xi, _ = _fields(params)
    kappa = probe.signal_sensitivity
    t_pre = probe.post_build_trust
    trust = t_pre + 0.0 * np.asarray(lp)
    rep = probe.initial_reputation + 0.0 * np.asarray(mu)
    trust, rep = probe_step(trust, rep, probe.severe_deviation, kappa, lp, lm, mu, dr, xi, probe.d_mid)
    peak = np.asarray(trust, dtype=float).copy()
    for _ in range(probe.recovery_window):
        trust, rep = probe_step(trust, rep, probe.cooperation_deviation,
                                kappa, lp, lm, mu, dr, xi, probe.d_mid)
        peak = np.maximum(peak, trust)
    return peak / t_pre


def cumulative_amplification(params, probe: MetricProbeSpec = MetricProbeSpec()):
    """Surviving-trust ratio of one equivalent large violation vs repeated small ones.

    The repeated arm unfolds over a longer horizon: cooperation continues
    for build_periods, then the small violations land back to back; the
    single-violation arm breaches immediately with the deviation-sum
    equivalent (count * small_deviation).  Both arms get the same short
    cooperative tail, and the metric is trust surviving the single arm
    over trust surviving the repeated arm: above 1 whenever drawn-out
    repeated violations destroy more trust than one equivalent breach.
    """
    lp, lm, mu, dr, xi, _ = _fields(params)
    kappa = probe.signal_sensitivity
    tail = 2

    t_many = probe.post_build_trust + 0.0 * np.asarray(lm)
    r_many = probe.initial_reputation + 0.0 * np.asarray(mu)
    for _ in range(probe.build_periods):
        t_many, r_many = probe_step(t_many, r_many, probe.cooperation_deviation,
                                    kappa, lp, lm, mu, dr, xi, probe.d_mid)
    for _ in range(probe.small_violation_count):
        t_many, r_many = probe_step(t_many, r_many, probe.small_deviation,
                                    kappa, lp, lm, mu, dr, xi, probe.d_mid)
    for _ in range(tail):
        t_many, r_many = probe_step(t_many, r_many, probe.cooperation_deviation,
                                    kappa, lp, lm, mu, dr, xi, probe.d_mid)

    t_one = probe.post_build_trust + 0.0 * np.asarray(lm)
    r_one = probe.initial_reputation + 0.0 * np.asarray(mu)
    big = probe.small_violation_count * probe.small_deviation
    t_one, r_one = probe_step(t_one, r_one, big, kappa, lp, lm, mu, dr, xi, probe.d_mid)
    for _ in range(tail):
        t_one, r_one = probe_step(t_one, r_one, probe.cooperation_deviation,
                                  kappa, lp, lm, mu, dr, xi, probe.d_mid)

    if np.any(np.asarray(t_many) <= 0.0):
        raise ValueError("degenerate probe: repeated-violation arm destroyed all trust")
    return t_one / t_many


def time_to_half_recovery(params, probe: MetricProbeSpec = MetricProbeSpec()):
    """Cooperative periods until trust regains half its pre-crisis level.

    A crisis of crisis_periods severe violations hits the standardized
    post-build state; the count is 0 when the crisis leaves trust at or
    above half, and recovery_cap + 1 marks no recovery within the cap.
    """
    lp, lm, mu, dr, xi, _ = _fields(params)
    kappa = probe.signal_sensitivity
    t_pre = probe.post_build_trust
    trust = t_pre + 0.0 * np.asarray(lp, dtype=float)
    rep = probe.initial_reputation + 0.0 * np.asarray(mu, dtype=float)
    for _ in range(probe.crisis_periods):
        trust, rep = probe_step(trust, rep, probe.severe_deviation, kappa, lp, lm, mu, dr, xi, probe.d_mid)
    target = 0.5 * t_pre
    scalar = np.ndim(trust) == 0
    trust = np.atleast_1d(np.asarray(trust, dtype=float))
    rep = np.broadcast_to(np.asarray(rep, dtype=float), trust.shape).copy()
    periods = np.full(trust.shape, float(probe.recovery_cap + 1))
    reached = trust >= target
    periods[reached] = 0.0
    for k in range(1, probe.recovery_cap + 1):
        if np.all(reached):
            break
        trust, rep = probe_step(trust, rep, probe.cooperation_deviation,
                                kappa, lp, lm, mu, dr, xi, probe.d_mid)
        newly = (trust >= target) & ~reached
        periods[newly] = float(k)
        reached |= newly
    if scalar:
        return float(periods[0])
    return periods


def evaluate_config(params: TrustParams,
                    probe: MetricProbeSpec = MetricProbeSpec()) -> ConfigOutcome:
    """All seven metrics for one parameter configuration."""
    return ConfigOutcome(
        negativity_ratio=float(negativity_ratio(params)),
        hysteresis_recovery=float(hysteresis_recovery(params, probe)),
        cumulative_amplification=float(cumulative_amplification(params, probe)),
        dependency_amplification=float(dependency_amplification(params, probe)),
        building_rate=float(building_rate(params, probe)),
        single_period_erosion=float(single_period_erosion(params, probe)),
        time_to_half_recovery=float(time_to_half_recovery(params, probe)),
    )

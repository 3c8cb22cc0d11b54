"""Dynamic trust and reputation in strategic coopetition.

Simulation library and experiment harness for two-layer trust/reputation
dynamics between interdependent strategic actors: asymmetric trust updates
gated by reputation damage, dependency-augmented utilities with trust-gated
reciprocity, phase-structured scenario simulation, a full seven-parameter
factorial sweep with outcome metrics and Pareto analysis, a value-iteration
equilibrium solver, and a 60-point case-study validation scorer with the
Renault-Nissan alliance scenario built in.
"""

from coopetition.trust import (
    TrustParams,
    DyadState,
    SystemState,
    CooperationSignal,
    cooperation_signal,
    trust_delta,
    reputation_step,
    dyad_step,
    system_step,
    ModelInvariantError,
)
from coopetition.istar import (
    Actor,
    Dependum,
    DependencyNetwork,
    InterdependenceMatrix,
    RubricAssessment,
    compute_interdependence,
    build_matrix,
    rubric_to_value,
)
from coopetition.economy import (
    EconomyParams,
    value_creation,
    private_payoff,
    base_utility,
    extended_utility,
)
from coopetition.scenario import (
    PhaseSpec,
    Scenario,
    Trajectory,
    simulate,
    renault_nissan_scenario,
)
from coopetition.metrics import MetricProbeSpec, ConfigOutcome, evaluate_config

__version__ = "0.1.0"

__all__ = [
    "TrustParams", "DyadState", "SystemState", "CooperationSignal",
    "cooperation_signal", "trust_delta", "reputation_step", "dyad_step",
    "system_step", "ModelInvariantError",
    "Actor", "Dependum", "DependencyNetwork", "InterdependenceMatrix",
    "RubricAssessment", "compute_interdependence", "build_matrix",
    "rubric_to_value",
    "EconomyParams", "value_creation", "private_payoff", "base_utility",
    "extended_utility",
    "PhaseSpec", "Scenario", "Trajectory", "simulate",
    "renault_nissan_scenario",
    "MetricProbeSpec", "ConfigOutcome", "evaluate_config",
]

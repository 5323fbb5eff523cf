"""Exact theory and simulation of (1+1)-type heuristics on generalized jump functions."""

from jumpbench.algorithms import (
    ALGORITHMS,
    InvalidStateError,
    RunRecord,
    init,
    run_to_optimum,
    step,
)
from jumpbench.core import (
    NO_IMPROVEMENT,
    Bitstring,
    JumpInstance,
    classic_jump_fitness,
    gap,
    hamming_distance,
    jump_fitness,
)
from jumpbench.distributions import (
    GeometricLaw,
    PowerLaw,
    UnitationDistribution,
    offspring_unitation_distribution,
)
from jumpbench.experiments import ExperimentPlan, RunStats, regime_catalog, run_plan
from jumpbench.simulator import JumpPhaseModel, cross_validate, simulate_full, simulate_partial
from jumpbench.theory import (
    big_f,
    ea_runtime_bounds,
    fea_jump_success,
    optimal_rate_runtime,
    sdrls_runtime_estimate,
    sdrls_step_success,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "Bitstring",
    "ExperimentPlan",
    "GeometricLaw",
    "InvalidStateError",
    "JumpInstance",
    "JumpPhaseModel",
    "NO_IMPROVEMENT",
    "PowerLaw",
    "RunRecord",
    "RunStats",
    "UnitationDistribution",
    "big_f",
    "classic_jump_fitness",
    "cross_validate",
    "ea_runtime_bounds",
    "fea_jump_success",
    "gap",
    "hamming_distance",
    "init",
    "jump_fitness",
    "offspring_unitation_distribution",
    "optimal_rate_runtime",
    "regime_catalog",
    "run_plan",
    "run_to_optimum",
    "sdrls_runtime_estimate",
    "sdrls_step_success",
    "simulate_full",
    "simulate_partial",
    "step",
]

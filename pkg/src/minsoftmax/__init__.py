"""Robust dynamic programming with entropy-regularized softmax adversaries.

Finite-space backward value iteration where the inner maximization over
disturbance distributions has the closed form of a softmax, a
linear-quadratic Gaussian solver with analytic adversaries and an
H-infinity attenuation certificate, brute-force oracles for verification,
Monte-Carlo policy rollouts, and scenario-file tooling.
"""

from .core import (
    FiniteSystem,
    LqSolution,
    LqSystem,
    Penalties,
    RiccatiConfig,
    SolveResult,
    validate_finite_system,
)
from .errors import MinsoftmaxError, ValidationError
from .lq_gauss import (
    AttenuationProbes,
    certify_attenuation,
    critical_gamma_h,
    f_a,
    f_c,
    lqr_gain,
    solve_finite_horizon,
    solve_infinite_horizon,
)
from .montecarlo import RolloutSpec, TrajectoryStats, empirical_cost_estimate, rollout
from .oracle import gaussian_quadrature_q, regularized_objective, simplex_search
from .scenarios import (
    ScenarioFile,
    build_irrigation,
    build_likely_worst_case_scenario,
    build_noise_floor_scenario,
    discretize_scalar_lq,
    load_scenario,
    scalar_lq_benchmark,
    write_bundled_scenarios,
)
from .solver_finite import (
    alpha_row,
    q_value,
    softmax_adversary,
    solve_backward,
    solve_limit,
    worst_case_index,
)

__version__ = "0.1.0"

__all__ = [
    "AttenuationProbes",
    "FiniteSystem",
    "LqSolution",
    "LqSystem",
    "MinsoftmaxError",
    "Penalties",
    "RiccatiConfig",
    "RolloutSpec",
    "ScenarioFile",
    "SolveResult",
    "TrajectoryStats",
    "ValidationError",
    "alpha_row",
    "build_irrigation",
    "build_likely_worst_case_scenario",
    "build_noise_floor_scenario",
    "certify_attenuation",
    "critical_gamma_h",
    "discretize_scalar_lq",
    "empirical_cost_estimate",
    "f_a",
    "f_c",
    "gaussian_quadrature_q",
    "load_scenario",
    "lqr_gain",
    "q_value",
    "regularized_objective",
    "rollout",
    "scalar_lq_benchmark",
    "simplex_search",
    "softmax_adversary",
    "solve_backward",
    "solve_finite_horizon",
    "solve_infinite_horizon",
    "solve_limit",
    "validate_finite_system",
    "worst_case_index",
]

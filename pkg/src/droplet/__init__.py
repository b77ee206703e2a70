"""Quasi-static droplet free-boundary simulator.

Torsion solves with unit-volume normalization on marker-tracked domains,
mobility-driven contact-line motion, exact equilateral-triangle oracles,
and the convexity-breaking certification pipeline.
"""

from .counterexample import BreakingReport, certify, fit_gap_slopes, gap_series, plan, run_counterexample
from .errors import (
    ConfigError,
    DropletError,
    FilletTooLargeError,
    IllConditionedSolveError,
    InvalidCurveError,
    InvalidLawError,
    OutOfDomainError,
    SearchFailureError,
    TopologyChangeError,
)
from .evolution import EvolutionState, StepperConfig, initial_state, run, step
from .exact_solutions import (
    DiskTorsionOracle,
    EdgeVelocityProfile,
    TriangleOracle,
    choose_a,
    disk_oracle,
    find_nonconvex_pair,
    integral_over_triangle,
    triangle_quadrature,
)
from .geometry import (
    ClosedCurve,
    RoundedTriangleSpec,
    curve_queries,
    extract_graph_height,
    is_convex,
    make_disk,
    make_rounded_triangle,
    resample_uniform,
)
from .mobility import MobilityLaw, check_assumption, parse_law, power_minus_one
from .torsion_solver import NormalizedField, SolverConfig, TorsionSolution, interior_eval, normalize, solve_torsion

__version__ = "0.1.0"

__all__ = [
    "BreakingReport",
    "ClosedCurve",
    "ConfigError",
    "DiskTorsionOracle",
    "DropletError",
    "EdgeVelocityProfile",
    "EvolutionState",
    "FilletTooLargeError",
    "IllConditionedSolveError",
    "InvalidCurveError",
    "InvalidLawError",
    "MobilityLaw",
    "NormalizedField",
    "OutOfDomainError",
    "RoundedTriangleSpec",
    "SearchFailureError",
    "SolverConfig",
    "StepperConfig",
    "TopologyChangeError",
    "TorsionSolution",
    "TriangleOracle",
    "certify",
    "check_assumption",
    "choose_a",
    "curve_queries",
    "disk_oracle",
    "extract_graph_height",
    "find_nonconvex_pair",
    "fit_gap_slopes",
    "gap_series",
    "initial_state",
    "integral_over_triangle",
    "interior_eval",
    "is_convex",
    "make_disk",
    "make_rounded_triangle",
    "normalize",
    "parse_law",
    "plan",
    "power_minus_one",
    "resample_uniform",
    "run",
    "run_counterexample",
    "solve_torsion",
    "step",
    "triangle_quadrature",
]

"""Front-tracking time integration of the free boundary.

Each step: evaluate V = F(|Du|) from the current normalized torsion field,
transport markers along outward normals by forward Euler, optionally
resample to uniform arclength, and re-solve on the new curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidCurveError, TopologyChangeError
from .geometry import ClosedCurve, resample_uniform
from .mobility import MobilityLaw
from .torsion_solver import NormalizedField, SolverConfig, TorsionSolution, normalize, solve_torsion

VELOCITY_FLOOR = 1e-12  # guards the CFL quotient for near-stationary states


@dataclass(frozen=True)
class StepperConfig:
    dt_max: float
    t_end: float
    output_every: float | None = None
    cfl: float = 0.4
    resample_every: int = 5
    marker_count: int | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.dt_max <= 0.0:
            raise ValueError("dt_max must be positive")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.t_end < 0.0:
            raise ValueError("t_end must be non-negative")
        if self.output_every is not None and self.output_every <= 0.0:
            raise ValueError("output_every must be positive")
        if self.resample_every < 1:
            raise ValueError("resample_every must be at least 1")


@dataclass(frozen=True)
class EvolutionState:
    """Snapshot of the coupled curve/field system at one time."""

    t: float
    curve: ClosedCurve
    solution: TorsionSolution
    field: NormalizedField
    velocity: np.ndarray


def _state_for(t: float, curve: ClosedCurve, law: MobilityLaw, solver: SolverConfig) -> EvolutionState:
    solution = solve_torsion(curve, solver)
    fld = normalize(solution)
    velocity = np.asarray(law.f(fld.boundary_gradient), dtype=float)
    return EvolutionState(t, curve, solution, fld, velocity)


def initial_state(curve: ClosedCurve, law: MobilityLaw, cfg: StepperConfig) -> EvolutionState:
    return _state_for(0.0, curve, law, cfg.solver)


def move_markers(curve: ClosedCurve, velocity: np.ndarray, dt: float) -> ClosedCurve:
    """Transport markers along outward normals; failure means topology change."""
    new_pts = curve.points + dt * np.asarray(velocity)[:, None] * curve.outward_normals()
    try:
        return ClosedCurve(new_pts)
    except InvalidCurveError as err:
        raise TopologyChangeError(f"marker transport broke the curve: {err}") from err


def step(
    state: EvolutionState,
    law: MobilityLaw,
    cfg: StepperConfig,
    *,
    resample: bool = False,
    dt_cap: float = math.inf,
) -> EvolutionState:
    """One forward-Euler step with CFL-limited dt."""
    vmax = max(float(np.abs(state.velocity).max()), VELOCITY_FLOOR)
    dt = min(cfg.dt_max, cfg.cfl * state.curve.min_edge_length() / vmax, dt_cap)
    try:
        curve = move_markers(state.curve, state.velocity, dt)
        if resample:
            curve = resample_uniform(curve, cfg.marker_count or len(state.curve))
    except TopologyChangeError as err:
        err.state = state  # keep the last valid state for inspection
        raise
    return _state_for(state.t + dt, curve, law, cfg.solver)


def run(curve: ClosedCurve, law: MobilityLaw, cfg: StepperConfig) -> list[EvolutionState]:
    """Integrate to t_end, returning snapshots at t = 0 and each output time."""
    state = initial_state(curve, law, cfg)
    snapshots = [state]
    if cfg.t_end == 0.0:
        return snapshots
    out_every = cfg.output_every if cfg.output_every is not None else cfg.t_end
    next_out = min(out_every, cfg.t_end)
    tiny = 1e-12 * max(cfg.t_end, 1.0)
    k = 0
    while state.t < cfg.t_end - tiny:
        k += 1
        state = step(
            state,
            law,
            cfg,
            resample=(k % cfg.resample_every == 0),
            dt_cap=next_out - state.t,
        )
        if state.t >= next_out - tiny:
            snapshots.append(state)
            next_out = min(next_out + out_every, cfg.t_end)
    return snapshots

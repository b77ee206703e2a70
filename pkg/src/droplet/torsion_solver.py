"""Torsion solve -Delta w = 1, w = 0 on the boundary, by boundary collocation.

The solver splits w into a quadratic particular solution (centered at the
domain centroid, so results are translation invariant) plus a harmonic
completion represented by free-space log sources placed outside the domain,
offset along the outward normals.  A constant basis term is included: the
log sources alone cannot represent constants, and the minimum-norm
truncated-SVD least-squares solve then fixes the resulting null direction.

Normalizing by the mass M gives the unit-volume field u = w/M with
multiplier lambda = 1/M and boundary gradient |Du| = flux/M.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import IllConditionedSolveError, OutOfDomainError
from .geometry import ClosedCurve

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SolverConfig:
    """Collocation solver knobs (the JSON `solver` block mirrors these).

    mass_method "grid" integrates w over a cell grid (simple, fully
    independent of the representation); "boundary" integrates the
    representation exactly through a divergence identity and is much
    faster, which matters inside evolution loops.  The two agree to
    quadrature accuracy and are cross-checked in the test suite.
    """

    sources_per_marker: int = 1
    offset_factor: float = 1.5
    svd_cutoff: float = 1e-12
    mass_grid_factor: float = 1.0
    mass_method: str = "grid"
    boundary_tol: float = 0.05
    interior_tol: float = 1e-2

    def __post_init__(self):
        if self.sources_per_marker < 1:
            raise ValueError("sources_per_marker must be at least 1")
        if self.offset_factor <= 0.0 or self.svd_cutoff <= 0.0 or self.mass_grid_factor <= 0.0:
            raise ValueError("solver parameters must be positive")
        if self.mass_method not in ("grid", "boundary"):
            raise ValueError("mass_method must be 'grid' or 'boundary'")


@dataclass(frozen=True)
class SolveDiagnostics:
    boundary_residual: float
    interior_residual: float
    condition_estimate: float
    rank: int
    flux_floor_count: int


@dataclass(frozen=True)
class TorsionSolution:
    """Solved torsion field with its boundary data and interior evaluator."""

    curve: ClosedCurve
    boundary_flux: np.ndarray
    mass: float
    centroid: np.ndarray
    sources: np.ndarray
    coefficients: np.ndarray  # constant term first, then one weight per source
    diagnostics: SolveDiagnostics

    def evaluate(self, pts) -> np.ndarray:
        """Representation value w at points (no domain membership check)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty(pts.shape[0])
        chunk = max(1, int(4e6) // max(1, self.sources.shape[0]))
        for start in range(0, pts.shape[0], chunk):
            block = pts[start : start + chunk]
            d2 = (block[:, None, 0] - self.sources[None, :, 0]) ** 2 + (
                block[:, None, 1] - self.sources[None, :, 1]
            ) ** 2
            harmonic = self.coefficients[0] - (np.log(d2) / (2.0 * TWO_PI)) @ self.coefficients[1:]
            particular = -((block[:, 0] - self.centroid[0]) ** 2 + (block[:, 1] - self.centroid[1]) ** 2) / 4.0
            out[start : start + chunk] = particular + harmonic
        return out

    def gradient(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        dx = pts[:, None, 0] - self.sources[None, :, 0]
        dy = pts[:, None, 1] - self.sources[None, :, 1]
        d2 = dx**2 + dy**2
        w = self.coefficients[1:] / TWO_PI
        gx = -(dx / d2) @ w - (pts[:, 0] - self.centroid[0]) / 2.0
        gy = -(dy / d2) @ w - (pts[:, 1] - self.centroid[1]) / 2.0
        return np.column_stack([gx, gy])


@dataclass(frozen=True)
class NormalizedField:
    """Unit-volume normalization: lambda = 1/M, |Du| = flux/M."""

    lambda_: float
    boundary_gradient: np.ndarray


def _quasi_uniform_check(curve: ClosedCurve) -> None:
    ratio = curve.max_edge_length() / curve.min_edge_length()
    if ratio > 3.0:
        raise ValueError(
            f"marker spacing must be quasi-uniform (max/min edge {ratio:.2f} > 3)"
        )


def _scanline_inside(curve: ClosedCurve, pts: np.ndarray) -> np.ndarray:
    """Point-in-polygon for point sets sharing many y values (grid rows)."""
    px = curve.points[:, 0]
    py = curve.points[:, 1]
    qx = np.roll(px, -1)
    qy = np.roll(py, -1)
    x = pts[:, 0]
    y = pts[:, 1]
    inside = np.zeros(pts.shape[0], dtype=bool)
    order = np.argsort(y, kind="stable")
    ys = y[order]
    starts = np.flatnonzero(np.concatenate([[True], ys[1:] != ys[:-1]]))
    ends = np.append(starts[1:], ys.size)
    for s0, s1 in zip(starts, ends):
        yy = ys[s0]
        straddle = (py > yy) != (qy > yy)
        idx = order[s0:s1]
        if not straddle.any():
            continue
        t = (yy - py[straddle]) / (qy[straddle] - py[straddle])
        xint = np.sort(px[straddle] + t * (qx[straddle] - px[straddle]))
        right = xint.size - np.searchsorted(xint, x[idx], side="right")
        inside[idx] = (right % 2) == 1
    return inside


def _mass_quadrature(curve: ClosedCurve, solution_eval, cell: float) -> float:
    """Grid quadrature of w over the polygon interior.

    Cells are anchored at the centroid so translated domains integrate
    identically.  Cells near the boundary (flagged by walking the polyline
    at quarter-cell steps) are refined 4x4 with subcell centers classified
    individually.  Midpoint-rule cells carry the exact -h^2/24 correction
    available because Delta w = -1 everywhere inside.
    """
    z = curve.centroid()
    lo, hi = curve.bounding_box()
    i0 = int(np.floor((lo[0] - z[0]) / cell)) - 1
    i1 = int(np.ceil((hi[0] - z[0]) / cell)) + 1
    j0 = int(np.floor((lo[1] - z[1]) / cell)) - 1
    j1 = int(np.ceil((hi[1] - z[1]) / cell)) + 1
    nx, ny = i1 - i0, j1 - j0
    ox, oy = z[0] + i0 * cell, z[1] + j0 * cell

    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    centers = np.column_stack(
        [ox + (ii.ravel() + 0.5) * cell, oy + (jj.ravel() + 0.5) * cell]
    )
    inside = curve.contains_points(centers)

    # Flag every cell the boundary polyline passes near.
    pts = curve.points
    closed = np.vstack([pts, pts[:1]])
    seg = np.hypot(*(np.diff(closed, axis=0).T))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    n_samples = max(16, int(np.ceil(4.0 * s[-1] / cell)))
    walk = np.arange(n_samples) * (s[-1] / n_samples)
    bx = np.interp(walk, s, closed[:, 0])
    by = np.interp(walk, s, closed[:, 1])
    ci = np.floor((bx - ox) / cell).astype(int)
    cj = np.floor((by - oy) / cell).astype(int)
    near = np.zeros((nx, ny), dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            ki = np.clip(ci + di, 0, nx - 1)
            kj = np.clip(cj + dj, 0, ny - 1)
            near[ki, kj] = True
    near = near.ravel()

    full = inside & ~near
    mass = 0.0
    if full.any():
        w = solution_eval(centers[full])
        mass += cell**2 * float(np.sum(w - cell**2 / 24.0))

    if near.any():
        sub = cell / 4.0
        offsets = (np.arange(4) + 0.5) * sub - cell / 2.0
        odx, ody = np.meshgrid(offsets, offsets, indexing="ij")
        shifts = np.column_stack([odx.ravel(), ody.ravel()])
        base = centers[near]
        subpts = (base[:, None, :] + shifts[None, :, :]).reshape(-1, 2)
        keep = curve.contains_points(subpts)
        if keep.any():
            w = solution_eval(subpts[keep])
            mass += sub**2 * float(np.sum(w - sub**2 / 24.0))
    return mass


def solve_torsion(curve: ClosedCurve, config: SolverConfig | None = None) -> TorsionSolution:
    """Solve -Delta w = 1 with w = 0 on the curve; see the module docstring."""
    cfg = config or SolverConfig()
    _quasi_uniform_check(curve)
    pts = curve.points
    normals = curve.outward_normals()
    spacing = curve.local_spacing()
    z = curve.centroid()

    rings = [
        pts + (k * cfg.offset_factor) * spacing[:, None] * normals
        for k in range(1, cfg.sources_per_marker + 1)
    ]
    sources = np.vstack(rings)

    d2 = (pts[:, None, 0] - sources[None, :, 0]) ** 2 + (
        pts[:, None, 1] - sources[None, :, 1]
    ) ** 2
    system = np.hstack([np.ones((len(curve), 1)), -np.log(d2) / (2.0 * TWO_PI)])
    rhs = ((pts[:, 0] - z[0]) ** 2 + (pts[:, 1] - z[1]) ** 2) / 4.0

    coef, _, rank, svals = np.linalg.lstsq(system, rhs, rcond=cfg.svd_cutoff)
    kept = svals[svals > cfg.svd_cutoff * svals[0]]
    cond_est = float(svals[0] / kept[-1]) if kept.size else np.inf

    dx = pts[:, None, 0] - sources[None, :, 0]
    dy = pts[:, None, 1] - sources[None, :, 1]
    weights = coef[1:] / TWO_PI
    grad_n = (
        -(normals[:, 0:1] * dx + normals[:, 1:2] * dy) / d2 @ weights
        - 0.5 * (normals[:, 0] * (pts[:, 0] - z[0]) + normals[:, 1] * (pts[:, 1] - z[1]))
    )
    flux = -grad_n
    floor = 1e-14 * max(1.0, float(np.max(flux, initial=0.0)))
    floored = flux <= 0.0
    if floored.any():
        log.debug("floored %d non-positive boundary flux values", int(floored.sum()))
        flux = np.where(floored, floor, flux)

    solution = TorsionSolution(
        curve=curve,
        boundary_flux=flux,
        mass=np.nan,
        centroid=z,
        sources=sources,
        coefficients=coef,
        diagnostics=SolveDiagnostics(np.nan, np.nan, cond_est, int(rank), int(floored.sum())),
    )

    # Off-collocation boundary residual at chord midpoints, relative to the
    # boundary-data scale of the harmonic subproblem.
    mids = 0.5 * (pts + np.roll(pts, -1, axis=0))
    residual = float(np.max(np.abs(solution.evaluate(mids)))) / float(np.max(rhs))
    if residual > cfg.boundary_tol:
        raise IllConditionedSolveError(
            f"boundary residual {residual:.3e} exceeds tolerance {cfg.boundary_tol:.1e} "
            f"(condition estimate {cond_est:.3e})"
        )

    # Interior PDE residual at the centroid by a 5-point stencil.
    interior_residual = np.nan
    if bool(curve.contains_points(z[None, :])[0]):
        h = 0.02 * np.sqrt(curve.signed_area())
        stencil = z[None, :] + np.array(
            [[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]]
        )
        w = solution.evaluate(stencil)
        interior_residual = float(abs((w[1:].sum() - 4.0 * w[0]) / h**2 + 1.0))
        if interior_residual > cfg.interior_tol:
            raise IllConditionedSolveError(
                f"interior PDE residual {interior_residual:.3e} exceeds "
                f"tolerance {cfg.interior_tol:.1e}"
            )

    mass = _mass_quadrature(curve, solution.evaluate, curve.min_edge_length() * cfg.mass_grid_factor)
    if mass <= 0.0:
        raise IllConditionedSolveError(f"non-positive mass {mass:.3e}")

    return replace(
        solution,
        mass=mass,
        diagnostics=replace(
            solution.diagnostics,
            boundary_residual=residual,
            interior_residual=interior_residual,
        ),
    )


def normalize(solution: TorsionSolution) -> NormalizedField:
    """Rescale to the unit-volume field: invariant under w -> alpha*w."""
    if not solution.mass > 0.0:
        raise ValueError("normalization needs a positive mass")
    return NormalizedField(
        lambda_=1.0 / solution.mass,
        boundary_gradient=solution.boundary_flux / solution.mass,
    )


def interior_eval(solution: TorsionSolution, p) -> float:
    """w at a single strictly interior point."""
    p = np.asarray(p, dtype=float)
    if not bool(solution.curve.contains_points(p[None, :])[0]):
        raise OutOfDomainError("point is not strictly inside the domain")
    return float(solution.evaluate(p[None, :])[0])

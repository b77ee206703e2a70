"""Closed-form torsion solutions used as oracles.

The equilateral-triangle solution (with its normalization constant and
edge-gradient profile) drives the convexity-breaking pipeline; the radial
disk solution validates the numerical solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomainError, SearchFailureError
from .geometry import SQRT3
from .mobility import MobilityLaw


@dataclass(frozen=True)
class TriangleOracle:
    """Torsion field on the triangle with vertices (-a,0), (a,0), (0, a*sqrt(3)).

    The field c*y*((y - a*sqrt(3))**2 - 3*x**2) with c = 5/(3*a**5) has
    constant Laplacian -4*a*c*sqrt(3), vanishes on the triangle boundary
    and integrates to one over the triangle.
    """

    a: float

    def __post_init__(self):
        if self.a <= 0.0:
            raise ValueError("half side length a must be positive")

    @property
    def c(self) -> float:
        return 5.0 / (3.0 * self.a**5)

    @property
    def lambda0(self) -> float:
        return 4.0 * self.a * self.c * SQRT3

    def vertices(self) -> np.ndarray:
        return np.array([[-self.a, 0.0], [self.a, 0.0], [0.0, self.a * SQRT3]])

    def value(self, p) -> np.ndarray | float:
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        out = self.c * y * ((y - self.a * SQRT3) ** 2 - 3.0 * x**2)
        return float(out) if out.ndim == 0 else out

    def gradient(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        s = y - self.a * SQRT3
        gx = -6.0 * self.c * x * y
        gy = self.c * (s**2 - 3.0 * x**2 + 2.0 * y * s)
        return np.stack([gx, gy], axis=-1)

    def edge_gradient(self, x) -> np.ndarray | float:
        """|grad| on the bottom edge: 3c(a^2 - x^2)."""
        x = np.asarray(x, dtype=float)
        out = 3.0 * self.c * (self.a**2 - x**2)
        return float(out) if out.ndim == 0 else out

    def laplacian_residual(self, p, step: float = 1e-4) -> float:
        """|Delta v + 4ac*sqrt(3)| by the 5-point stencil at p."""
        p = np.asarray(p, dtype=float)
        offsets = np.array([[step, 0.0], [-step, 0.0], [0.0, step], [0.0, -step]])
        lap = (self.value(p[None, :] + offsets).sum() - 4.0 * self.value(p)) / step**2
        return abs(lap + self.lambda0)


def triangle_quadrature(f, a: float, order: int = 16) -> float:
    """Integrate f(x, y) over the oracle triangle via a Duffy-mapped Gauss rule."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    ss, tt = np.meshgrid(s, s, indexing="ij")
    ww = np.outer(w, w)
    x = a * (1.0 - tt) * (2.0 * ss - 1.0)
    y = a * SQRT3 * tt
    jac = 2.0 * a * (1.0 - tt) * a * SQRT3
    return float(np.sum(ww * jac * f(x, y)))


def integral_over_triangle(oracle: TriangleOracle, order: int = 16) -> float:
    """Quadrature of the oracle field over its triangle (exact value 1)."""
    return triangle_quadrature(
        lambda x, y: oracle.value(np.stack([x, y], axis=-1)), oracle.a, order
    )


@dataclass(frozen=True)
class DiskTorsionOracle:
    """Radial torsion solution on the disk of radius R."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("disk radius must be positive")

    def value(self, r) -> np.ndarray | float:
        r = np.asarray(r, dtype=float)
        out = (self.radius**2 - r**2) / 4.0
        return float(out) if out.ndim == 0 else out

    @property
    def mass(self) -> float:
        return np.pi * self.radius**4 / 8.0

    @property
    def boundary_flux(self) -> float:
        return self.radius / 2.0

    @property
    def lambda_(self) -> float:
        return 8.0 / (np.pi * self.radius**4)

    @property
    def boundary_gradient(self) -> float:
        return 4.0 / (np.pi * self.radius**3)


def disk_oracle(radius: float) -> DiskTorsionOracle:
    return DiskTorsionOracle(radius)


@dataclass(frozen=True)
class EdgeVelocityProfile:
    """Normal velocity profile F(3c(a^2 - x^2)) along the flat bottom edge."""

    oracle: TriangleOracle
    law: MobilityLaw

    def _check_domain(self, x: np.ndarray) -> None:
        if np.any(np.abs(x) >= self.oracle.a):
            raise OutOfDomainError("edge velocity is defined for |x| < a only")

    def velocity(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        self._check_domain(x)
        out = self.law.f(self.oracle.edge_gradient(x))
        return float(out) if np.ndim(out) == 0 else out

    def second_derivative(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        self._check_domain(x)
        c = self.oracle.c
        g = self.oracle.edge_gradient(x)
        out = 36.0 * c**2 * x**2 * self.law.d2f(g) - 6.0 * c * self.law.df(g)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PairScan:
    """Result of the midpoint-gap grid scan."""

    x0: float
    x1: float
    gap: float
    convex_interval: tuple[float, float]


def find_nonconvex_pair(
    profile: EdgeVelocityProfile,
    n_grid: int = 400,
    x_lo: float | None = None,
    x_hi: float | None = None,
) -> PairScan:
    """Scan ordered pairs 0 < x0 < x1 < a for the largest midpoint gap.

    Only pairs whose endpoints and midpoint sit where the velocity profile
    is convex (second derivative positive) are admissible, mirroring the
    mechanism that produces the gap in the first place.  Raises
    SearchFailureError when no admissible pair has a positive gap.
    """
    a = profile.oracle.a
    lo = 0.02 * a if x_lo is None else x_lo
    hi = 0.98 * a if x_hi is None else x_hi
    if not (0.0 <= lo < hi < a):
        raise SearchFailureError("pair scan window is empty")
    grid = np.linspace(lo, hi, n_grid)
    vel = profile.velocity(grid)
    vpp = profile.second_derivative(grid)

    mids = 0.5 * (grid[:, None] + grid[None, :])
    gap = 0.5 * (vel[:, None] + vel[None, :]) - profile.velocity(mids)
    admissible = (
        np.triu(np.ones((n_grid, n_grid), dtype=bool), k=1)
        & (vpp[:, None] > 0.0)
        & (vpp[None, :] > 0.0)
        & (profile.second_derivative(mids) > 0.0)
    )
    gap = np.where(admissible, gap, -np.inf)
    best = np.unravel_index(np.argmax(gap), gap.shape)
    best_gap = gap[best]
    if not np.isfinite(best_gap) or best_gap <= 0.0:
        raise SearchFailureError(
            "no admissible pair with a positive midpoint gap at this resolution"
        )
    i, j = best
    positive = vpp > 0.0
    k0 = i
    while k0 > 0 and positive[k0 - 1]:
        k0 -= 1
    k1 = i
    while k1 + 1 < n_grid and positive[k1 + 1]:
        k1 += 1
    return PairScan(
        x0=float(grid[i]),
        x1=float(grid[j]),
        gap=float(best_gap),
        convex_interval=(float(grid[k0]), float(grid[k1])),
    )


def choose_a(gamma: float) -> float:
    """Half side length making the smallness condition hold for |x| >= a/2."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    return float((5.0 * gamma / 4.0) ** (1.0 / 3.0))

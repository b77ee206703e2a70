"""Planar closed curves for front tracking.

Curves are ordered marker points (counterclockwise, simple) stored as
``(N, 2)`` float arrays.  Everything here is a pure function of immutable
inputs; generators build disks, triangles and rounded triangles, and the
query helpers provide normals, curvature, convexity and graph extraction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidCurveError, OutOfDomainError

SQRT3 = float(np.sqrt(3.0))


def _validate_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidCurveError("markers must form an (N, 2) array")
    if pts.shape[0] < 3:
        raise InvalidCurveError("a closed curve needs at least 3 markers")
    if not np.all(np.isfinite(pts)):
        raise InvalidCurveError("marker coordinates must be finite")
    return pts


def _segment_pairs_intersect(p, q, r, s) -> np.ndarray:
    """Proper-crossing test for segment arrays (p->q) against (r->s)."""

    def orient(a, b, c):
        return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])

    d1 = orient(r, s, p)
    d2 = orient(r, s, q)
    d3 = orient(p, q, r)
    d4 = orient(p, q, s)
    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0))
    # Endpoint touching counts as non-simple; exact zeros with overlapping boxes.
    touch = (d1 == 0) | (d2 == 0) | (d3 == 0) | (d4 == 0)
    boxes = (
        (np.minimum(p[:, 0], q[:, 0]) <= np.maximum(r[:, 0], s[:, 0]))
        & (np.minimum(r[:, 0], s[:, 0]) <= np.maximum(p[:, 0], q[:, 0]))
        & (np.minimum(p[:, 1], q[:, 1]) <= np.maximum(r[:, 1], s[:, 1]))
        & (np.minimum(r[:, 1], s[:, 1]) <= np.maximum(p[:, 1], q[:, 1]))
    )
    return proper | (touch & boxes)


def _assert_simple(pts: np.ndarray) -> None:
    n = pts.shape[0]
    a = pts
    b = np.roll(pts, -1, axis=0)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    # Candidate pairs by bounding-box overlap, skipping adjacent segments.
    ii, jj = np.nonzero(
        (lo[:, None, 0] <= hi[None, :, 0])
        & (lo[None, :, 0] <= hi[:, None, 0])
        & (lo[:, None, 1] <= hi[None, :, 1])
        & (lo[None, :, 1] <= hi[:, None, 1])
    )
    keep = jj > ii + 1
    ii, jj = ii[keep], jj[keep]
    wrap = (ii == 0) & (jj == n - 1)
    ii, jj = ii[~wrap], jj[~wrap]
    if ii.size == 0:
        return
    hit = _segment_pairs_intersect(a[ii], b[ii], a[jj], b[jj])
    if hit.any():
        k = int(np.argmax(hit))
        raise InvalidCurveError(
            f"curve is not simple: segments {ii[k]} and {jj[k]} intersect"
        )


class ClosedCurve:
    """Simple closed polygonal curve, counterclockwise, immutable."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = _validate_points(points).copy()
        edges = np.roll(pts, -1, axis=0) - pts
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        scale = float(np.abs(pts).max()) or 1.0
        if lengths.min() <= 1e-14 * scale:
            raise InvalidCurveError("consecutive markers must be distinct")
        area = 0.5 * float(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1) - np.roll(pts[:, 0], -1) * pts[:, 1]))
        if area <= 0.0:
            raise InvalidCurveError("markers must be ordered counterclockwise")
        _assert_simple(pts)
        pts.setflags(write=False)
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    def __repr__(self) -> str:
        return f"ClosedCurve({len(self)} markers)"

    def edge_vectors(self) -> np.ndarray:
        return np.roll(self.points, -1, axis=0) - self.points

    def edge_lengths(self) -> np.ndarray:
        e = self.edge_vectors()
        return np.hypot(e[:, 0], e[:, 1])

    def min_edge_length(self) -> float:
        return float(self.edge_lengths().min())

    def max_edge_length(self) -> float:
        return float(self.edge_lengths().max())

    def perimeter(self) -> float:
        return float(self.edge_lengths().sum())

    def signed_area(self) -> float:
        p = self.points
        q = np.roll(p, -1, axis=0)
        return 0.5 * float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))

    def centroid(self) -> np.ndarray:
        """Area centroid of the enclosed polygon."""
        p = self.points
        q = np.roll(p, -1, axis=0)
        cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
        area = 0.5 * cross.sum()
        cx = np.sum((p[:, 0] + q[:, 0]) * cross) / (6.0 * area)
        cy = np.sum((p[:, 1] + q[:, 1]) * cross) / (6.0 * area)
        return np.array([cx, cy])

    def local_spacing(self) -> np.ndarray:
        """Average of the two edge lengths meeting at each marker."""
        lengths = self.edge_lengths()
        return 0.5 * (lengths + np.roll(lengths, 1))

    def outward_normals(self) -> np.ndarray:
        """Unit outward normals from central-difference tangents."""
        p = self.points
        t = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
        norm = np.hypot(t[:, 0], t[:, 1])
        if norm.min() <= 0.0:
            raise InvalidCurveError("degenerate tangent at a marker")
        # CCW orientation: rotating the tangent by -90 degrees points outward.
        return np.column_stack([t[:, 1], -t[:, 0]]) / norm[:, None]

    def signed_curvature(self) -> np.ndarray:
        """Three-point circumscribed-circle curvature; >= 0 on convex CCW curves."""
        b = self.points
        a = np.roll(b, 1, axis=0)
        c = np.roll(b, -1, axis=0)
        ab = b - a
        bc = c - b
        ac = c - a
        cross = ab[:, 0] * bc[:, 1] - ab[:, 1] * bc[:, 0]
        denom = (
            np.hypot(ab[:, 0], ab[:, 1])
            * np.hypot(bc[:, 0], bc[:, 1])
            * np.hypot(ac[:, 0], ac[:, 1])
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            kappa = np.where(denom > 0.0, 2.0 * cross / denom, 0.0)
        return kappa

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def contains_points(self, pts) -> np.ndarray:
        """Even-odd ray-casting test; boundary points are unspecified."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        px = self.points[:, 0]
        py = self.points[:, 1]
        qx = np.roll(px, -1)
        qy = np.roll(py, -1)
        inside = np.zeros(pts.shape[0], dtype=bool)
        chunk = 4096
        for start in range(0, pts.shape[0], chunk):
            x = pts[start : start + chunk, 0][:, None]
            y = pts[start : start + chunk, 1][:, None]
            straddle = (py[None, :] > y) != (qy[None, :] > y)
            with np.errstate(invalid="ignore", divide="ignore"):
                xint = px[None, :] + (y - py[None, :]) * (qx - px)[None, :] / (qy - py)[None, :]
            crossings = np.sum(straddle & (x < xint), axis=1)
            inside[start : start + chunk] = (crossings % 2) == 1
        return inside


@dataclass(frozen=True)
class CurveQueries:
    """Bundle of the standard per-curve geometric measurements."""

    signed_area: float
    perimeter: float
    outward_normals: np.ndarray
    signed_curvature: np.ndarray


def curve_queries(curve: ClosedCurve) -> CurveQueries:
    return CurveQueries(
        signed_area=curve.signed_area(),
        perimeter=curve.perimeter(),
        outward_normals=curve.outward_normals(),
        signed_curvature=curve.signed_curvature(),
    )


def make_disk(radius: float, n_markers: int, *, allow_coarse: bool = False) -> ClosedCurve:
    """Markers on the circle of given radius centered at the origin."""
    if radius <= 0.0:
        raise ValueError("disk radius must be positive")
    if n_markers < 8 and not allow_coarse:
        raise ValueError("make_disk needs at least 8 markers")
    if n_markers < 3:
        raise ValueError("make_disk needs at least 3 markers")
    theta = 2.0 * np.pi * np.arange(n_markers) / n_markers
    return ClosedCurve(np.column_stack([radius * np.cos(theta), radius * np.sin(theta)]))


@dataclass(frozen=True)
class RoundedTriangleSpec:
    """Equilateral triangle of side 2a with circular corner fillets of radius r."""

    a: float
    fillet_radius: float
    marker_count: int

    def __post_init__(self):
        if self.a <= 0.0:
            raise ValueError("half side length a must be positive")
        if not (0.0 <= self.fillet_radius < self.a / SQRT3):
            raise ValueError("fillet radius must satisfy 0 <= r < a/sqrt(3)")
        min_markers = 9 if self.fillet_radius == 0.0 else 18
        if self.marker_count < min_markers:
            raise ValueError(f"marker_count must be at least {min_markers}")


def _piece_points(n: int, start, end=None, *, arc=None):
    """n markers on a piece: start point plus interior points, end exclusive."""
    t = np.arange(n) / n
    if arc is not None:
        center, r, a0, a1 = arc
        ang = a0 + t * (a1 - a0)
        return np.column_stack([center[0] + r * np.cos(ang), center[1] + r * np.sin(ang)])
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    return start[None, :] + t[:, None] * (end - start)[None, :]


def make_rounded_triangle(spec: RoundedTriangleSpec) -> ClosedCurve:
    """Convex curve: triangle (-a,0), (a,0), (0, a*sqrt(3)) with tangent fillets.

    The bottom edge stays exactly on y = 0 for |x| <= a - sqrt(3) r; each
    fillet is the circular arc tangent to the two adjacent edges.
    """
    a = spec.a
    r = spec.fillet_radius
    n = spec.marker_count
    va = np.array([-a, 0.0])
    vb = np.array([a, 0.0])
    vc = np.array([0.0, a * SQRT3])

    if r == 0.0:
        n_edge = n // 3
        n_bottom = n - 2 * n_edge
        pts = np.vstack(
            [
                _piece_points(n_bottom, va, vb),
                _piece_points(n_edge, vb, vc),
                _piece_points(n_edge, vc, va),
            ]
        )
        pts[np.abs(pts[:, 1]) < 1e-15, 1] = 0.0
        return ClosedCurve(pts)

    cut = SQRT3 * r  # tangency distance from each vertex along the edges
    # Tangency points, walking counterclockwise from the bottom-left one.
    t_bottom_l = np.array([-(a - cut), 0.0])
    t_bottom_r = np.array([a - cut, 0.0])
    t_right_lo = vb + cut * np.array([-0.5, SQRT3 / 2.0])
    t_right_hi = vc + cut * np.array([0.5, -SQRT3 / 2.0])
    t_left_hi = vc + cut * np.array([-0.5, -SQRT3 / 2.0])
    t_left_lo = va + cut * np.array([0.5, SQRT3 / 2.0])
    # Fillet centers sit at distance 2r from each vertex along the bisector.
    c_b = np.array([a - cut, r])
    c_c = np.array([0.0, a * SQRT3 - 2.0 * r])
    c_a = np.array([-(a - cut), r])

    edge_len = 2.0 * (a - cut)
    arc_len = r * 2.0 * np.pi / 3.0
    total = 3.0 * (edge_len + arc_len)
    n_arc = max(3, int(round(n * arc_len / total)))
    n_side = max(3, int(round(n * edge_len / total)))
    n_bottom = n - 3 * n_arc - 2 * n_side
    if n_bottom < 3:
        raise ValueError("marker_count too small for this fillet radius")

    deg = np.pi / 180.0
    pts = np.vstack(
        [
            _piece_points(n_bottom, t_bottom_l, t_bottom_r),
            _piece_points(n_arc, None, arc=(c_b, r, -90.0 * deg, 30.0 * deg)),
            _piece_points(n_side, t_right_lo, t_right_hi),
            _piece_points(n_arc, None, arc=(c_c, r, 30.0 * deg, 150.0 * deg)),
            _piece_points(n_side, t_left_hi, t_left_lo),
            _piece_points(n_arc, None, arc=(c_a, r, 150.0 * deg, 270.0 * deg)),
        ]
    )
    pts[:n_bottom, 1] = 0.0  # keep the flat edge exactly flat
    return ClosedCurve(pts)


def default_convexity_tol(curve: ClosedCurve) -> float:
    """1e-6 per inradius, with 2*area/perimeter as the inradius proxy."""
    return 1e-6 * curve.perimeter() / (2.0 * curve.signed_area())


def is_convex(curve: ClosedCurve, tol: float | None = None) -> bool:
    """Convexity by signed curvature and the edge turning test."""
    if tol is None:
        tol = default_convexity_tol(curve)
    if np.any(curve.signed_curvature() < -tol):
        return False
    e = curve.edge_vectors()
    prev = np.roll(e, 1, axis=0)
    cross = prev[:, 0] * e[:, 1] - prev[:, 1] * e[:, 0]
    lp = np.hypot(prev[:, 0], prev[:, 1])
    le = np.hypot(e[:, 0], e[:, 1])
    lc = np.hypot(prev[:, 0] + e[:, 0], prev[:, 1] + e[:, 1])
    # Same tolerance scaling as the circumcircle curvature formula.
    return not np.any(cross < -0.5 * tol * lp * le * lc)


def resample_uniform(curve: ClosedCurve, n_markers: int) -> ClosedCurve:
    """n markers equally spaced in arclength along the piecewise-linear curve."""
    if n_markers < 8:
        raise ValueError("resample_uniform needs at least 8 markers")
    pts = curve.points
    closed = np.vstack([pts, pts[:1]])
    seg = np.hypot(*(np.diff(closed, axis=0).T))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    target = np.arange(n_markers) * (s[-1] / n_markers)
    x = np.interp(target, s, closed[:, 0])
    y = np.interp(target, s, closed[:, 1])
    return ClosedCurve(np.column_stack([x, y]))


def extract_graph_height(curve: ClosedCurve, x: float) -> float:
    """Smallest y where the vertical line at x meets the curve."""
    px = curve.points[:, 0]
    py = curve.points[:, 1]
    qx = np.roll(px, -1)
    qy = np.roll(py, -1)
    candidates = []
    vertical = (px == x) & (qx == x)
    if vertical.any():
        candidates.append(py[vertical])
        candidates.append(qy[vertical])
    straddle = ((px - x) * (qx - x) <= 0.0) & (px != qx)
    if straddle.any():
        t = (x - px[straddle]) / (qx[straddle] - px[straddle])
        candidates.append(py[straddle] + t * (qy[straddle] - py[straddle]))
    if not candidates:
        raise OutOfDomainError(f"vertical line x={x} does not meet the curve")
    return float(np.concatenate(candidates).min())


def convex_hull(points) -> np.ndarray:
    """Counterclockwise convex hull (monotone chain)."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] < 3:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, q = out[-2], out[-1]
                if (q[0] - o[0]) * (p[1] - o[1]) - (q[1] - o[1]) * (p[0] - o[0]) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def curve_to_csv(curve: ClosedCurve) -> str:
    lines = ["x,y"]
    for x, y in curve.points:
        lines.append(f"{x:.12e},{y:.12e}")
    return "\n".join(lines) + "\n"


def curve_from_csv(text: str) -> ClosedCurve:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0].strip() != "x,y":
        raise ValueError("curve CSV must start with the header 'x,y'")
    rows = [tuple(float(v) for v in ln.split(",")) for ln in lines[1:]]
    return ClosedCurve(np.asarray(rows))

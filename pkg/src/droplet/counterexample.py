"""End-to-end convexity-breaking pipeline on the rounded triangle.

Plan the run (mobility assumption, midpoint-gap pair, fillet small enough
to keep the pair on the untouched flat edge), evolve the curve, extract the
lower-boundary graph at the pair abscissae, and certify non-convexity three
independent ways: the midpoint gap, the curvature/turning test, and the
chord-midpoint-outside-the-domain test.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FilletTooLargeError, InvalidLawError, OutOfDomainError, SearchFailureError
from .evolution import EvolutionState, StepperConfig, run
from .exact_solutions import EdgeVelocityProfile, PairScan, TriangleOracle, find_nonconvex_pair
from .geometry import SQRT3, ClosedCurve, RoundedTriangleSpec, extract_graph_height, is_convex, make_rounded_triangle
from .mobility import MobilityLaw, check_assumption
from .torsion_solver import SolverConfig

PAIR_MARGIN = 0.95  # keep the scanned pair strictly inside the flat bottom


@dataclass(frozen=True)
class PlanRecord:
    law_name: str
    a: float
    fillet: float
    marker_count: int
    x0: float
    x1: float
    delta: float
    convex_interval: tuple[float, float]
    spec: RoundedTriangleSpec
    curve: ClosedCurve


def plan(
    law: MobilityLaw,
    a: float,
    fillet: float,
    marker_count: int,
    *,
    gamma: float = 1.0,
    pair: tuple[float, float] | None = None,
    n_grid: int = 400,
) -> PlanRecord:
    """Validate parameters and build the initial domain for a breaking run."""
    report = check_assumption(law, gamma)
    if not report.satisfied:
        raise InvalidLawError(
            f"law {law.name!r} fails the F''/F' >= gamma assumption "
            f"(inf ratio {report.inf_ratio:.3e} at gamma={gamma:g})"
        )
    oracle = TriangleOracle(a)
    profile = EdgeVelocityProfile(oracle, law)
    flat_half = a - SQRT3 * fillet

    if pair is not None:
        x0, x1 = pair
        if not 0.0 < x0 < x1 < a:
            raise ValueError("explicit pair must satisfy 0 < x0 < x1 < a")
        gap = 0.5 * (profile.velocity(x0) + profile.velocity(x1)) - profile.velocity(0.5 * (x0 + x1))
        if gap <= 0.0:
            raise SearchFailureError(f"explicit pair has non-positive gap {gap:.3e}")
        scan = PairScan(x0, x1, gap, (np.nan, np.nan))
    else:
        x_hi = min(0.98 * a, PAIR_MARGIN * flat_half)
        if x_hi <= 0.02 * a:
            raise FilletTooLargeError(
                f"fillet {fillet:g} leaves no flat bottom to scan (a = {a:g})"
            )
        scan = find_nonconvex_pair(profile, n_grid=n_grid, x_lo=0.02 * a, x_hi=x_hi)

    if flat_half <= scan.x1:
        raise FilletTooLargeError(
            f"flat bottom ends at {flat_half:.4f} < x1 = {scan.x1:.4f}; "
            "shrink the fillet or the pair"
        )

    spec = RoundedTriangleSpec(a=a, fillet_radius=fillet, marker_count=marker_count)
    curve = make_rounded_triangle(spec)
    if curve.points[:, 1].min() < -1e-12 * a:
        raise AssertionError("initial domain leaked below y = 0")
    for x in (scan.x0, 0.5 * (scan.x0 + scan.x1), scan.x1):
        if abs(extract_graph_height(curve, x)) > 1e-9 * a:
            raise AssertionError("pair abscissae do not sit on the flat bottom edge")

    return PlanRecord(
        law_name=law.name,
        a=a,
        fillet=fillet,
        marker_count=marker_count,
        x0=scan.x0,
        x1=scan.x1,
        delta=scan.gap,
        convex_interval=scan.convex_interval,
        spec=spec,
        curve=curve,
    )


@dataclass(frozen=True)
class GapSeries:
    """Midpoint-gap measurements along a trajectory (possibly truncated)."""

    times: np.ndarray
    gaps: np.ndarray
    heights: np.ndarray  # columns: g(x0), g(mid), g(x1)
    min_curvature: np.ndarray
    convex: np.ndarray
    chord_outside: np.ndarray
    truncated_reason: str | None = None


def gap_series(trajectory: list[EvolutionState], x0: float, x1: float) -> GapSeries:
    """G(t) = g(mid) - (g(x0) + g(x1))/2 from the lower boundary graph."""
    xm = 0.5 * (x0 + x1)
    times, gaps, heights, kmin, cvx, outside = [], [], [], [], [], []
    reason = None
    for state in trajectory:
        try:
            g0 = extract_graph_height(state.curve, x0)
            gm = extract_graph_height(state.curve, xm)
            g1 = extract_graph_height(state.curve, x1)
        except OutOfDomainError as err:
            reason = f"graph extraction failed at t={state.t:.6g}: {err}"
            break
        times.append(state.t)
        gaps.append(gm - 0.5 * (g0 + g1))
        heights.append((g0, gm, g1))
        kmin.append(float(state.curve.signed_curvature().min()))
        cvx.append(is_convex(state.curve))
        chord_mid = np.array([xm, 0.5 * (g0 + g1)])
        outside.append(not bool(state.curve.contains_points(chord_mid[None, :])[0]))
    return GapSeries(
        times=np.asarray(times),
        gaps=np.asarray(gaps),
        heights=np.asarray(heights).reshape(-1, 3),
        min_curvature=np.asarray(kmin),
        convex=np.asarray(cvx, dtype=bool),
        chord_outside=np.asarray(outside, dtype=bool),
        truncated_reason=reason,
    )


def fit_gap_slopes(times: np.ndarray, gaps: np.ndarray) -> tuple[float, float]:
    """Slope of G(t) through the origin: plain linear fit, and the linear
    coefficient of a quadratic fit (robust to the finite-time bending of G)."""
    mask = times > 0.0
    t = times[mask]
    g = gaps[mask]
    if t.size == 0:
        return float("nan"), float("nan")
    linear = float(t @ g / (t @ t))
    design = np.column_stack([t, t**2])
    coef, *_ = np.linalg.lstsq(design, g, rcond=None)
    return linear, float(coef[0])


def _terminal_onset(times: np.ndarray, flags: np.ndarray) -> float | None:
    """Earliest positive time from which a flag holds through the end."""
    ok = None
    for i in range(len(flags) - 1, 0, -1):
        if not flags[i]:
            break
        ok = float(times[i])
    return ok


@dataclass(frozen=True)
class Certificates:
    noise_floor: float
    t_gap: float | None
    t_nonconvex: float | None
    t_chord: float | None
    gap_positive_beyond_noise: bool


@dataclass(frozen=True)
class BreakingReport:
    law_name: str
    a: float
    fillet: float
    marker_count: int
    x0: float
    x1: float
    delta: float
    verdict: str
    t_star: float | None
    certificates: Certificates
    slope_linear: float
    slope_quadratic: float
    series: GapSeries
    truncated_reason: str | None = field(default=None)

    def to_dict(self) -> dict:
        s = self.series
        return {
            "law": self.law_name,
            "a": self.a,
            "fillet": self.fillet,
            "marker_count": self.marker_count,
            "x0": self.x0,
            "x1": self.x1,
            "delta": self.delta,
            "verdict": self.verdict,
            "t_star": self.t_star,
            "noise_floor": self.certificates.noise_floor,
            "t_certified_gap": self.certificates.t_gap,
            "t_certified_nonconvex": self.certificates.t_nonconvex,
            "t_certified_chord": self.certificates.t_chord,
            "gap_positive_beyond_noise": self.certificates.gap_positive_beyond_noise,
            "slope_linear": self.slope_linear,
            "slope_quadratic": self.slope_quadratic,
            "times": s.times.tolist(),
            "G": s.gaps.tolist(),
            "min_curvature": s.min_curvature.tolist(),
            "convex": s.convex.astype(int).tolist(),
            "chord_outside": s.chord_outside.astype(int).tolist(),
            "truncated_reason": self.truncated_reason,
        }


def certify(series: GapSeries, delta: float, a: float) -> tuple[str, float | None, Certificates]:
    """Combine the three non-convexity certificates into a verdict.

    The gap tolerance self-calibrates to ten times the measured t = 0
    graph-extraction noise (floored at machine scale), so it adapts to the
    fillet size instead of using a hand-tuned absolute threshold.
    """
    if series.times.size < 2:
        raise ValueError("certification needs at least two snapshots")
    noise = max(10.0 * abs(series.gaps[0]), 1e-12 * a)
    t_gap = _terminal_onset(series.times, series.gaps > noise)
    t_ncvx = _terminal_onset(series.times, ~series.convex)
    t_chord = _terminal_onset(series.times, series.chord_outside)

    beyond = series.times > 5.0 * noise / max(delta, 1e-300)
    sign_ok = bool(np.all(series.gaps[beyond] > 0.0)) and bool(beyond.any())

    certs = Certificates(noise, t_gap, t_ncvx, t_chord, sign_ok)
    found = [t for t in (t_gap, t_ncvx, t_chord) if t is not None]
    if len(found) == 3:
        return "broken", max(found), certs
    if len(found) == 0:
        return "not-broken", None, certs
    return "inconclusive", None, certs


def run_counterexample(
    law: MobilityLaw,
    a: float = 1.0,
    fillet: float = 0.02,
    marker_count: int = 800,
    *,
    dt_max: float = 2e-4,
    t_end: float = 0.02,
    output_every: float | None = None,
    cfl: float = 0.4,
    resample_every: int = 5,
    solver: SolverConfig | None = None,
    gamma: float = 1.0,
    pair: tuple[float, float] | None = None,
) -> tuple[BreakingReport, list[EvolutionState]]:
    """Plan, evolve, measure and certify one convexity-breaking run."""
    record = plan(law, a, fillet, marker_count, gamma=gamma, pair=pair)
    cfg = StepperConfig(
        dt_max=dt_max,
        t_end=t_end,
        output_every=output_every if output_every is not None else dt_max,
        cfl=cfl,
        resample_every=resample_every,
        marker_count=marker_count,
        solver=solver or SolverConfig(),
    )
    trajectory = run(record.curve, law, cfg)
    series = gap_series(trajectory, record.x0, record.x1)
    verdict, t_star, certs = certify(series, record.delta, a)
    slope_lin, slope_quad = fit_gap_slopes(series.times, series.gaps)
    report = BreakingReport(
        law_name=record.law_name,
        a=a,
        fillet=fillet,
        marker_count=marker_count,
        x0=record.x0,
        x1=record.x1,
        delta=record.delta,
        verdict=verdict,
        t_star=t_star,
        certificates=certs,
        slope_linear=slope_lin,
        slope_quadratic=slope_quad,
        series=series,
        truncated_reason=series.truncated_reason,
    )
    return report, trajectory

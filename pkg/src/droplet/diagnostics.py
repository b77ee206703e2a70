"""Per-snapshot measurement rows and CSV/JSON/SVG emission."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evolution import EvolutionState
from .geometry import ClosedCurve, convex_hull, curve_to_csv, is_convex
from .svg import render_svg

SERIES_HEADER = "t,area,lambda,min_flux,max_flux,min_curv,convex,G"


@dataclass(frozen=True)
class TimeSeriesRow:
    t: float
    area: float
    lambda_: float
    min_flux: float
    max_flux: float
    min_curvature: float
    convex: bool
    gap: float | None = None


def measure(state: EvolutionState, *, gap: float | None = None, convexity_tol: float | None = None) -> TimeSeriesRow:
    curve = state.curve
    return TimeSeriesRow(
        t=state.t,
        area=curve.signed_area(),
        lambda_=state.field.lambda_,
        min_flux=float(state.solution.boundary_flux.min()),
        max_flux=float(state.solution.boundary_flux.max()),
        min_curvature=float(curve.signed_curvature().min()),
        convex=is_convex(curve, convexity_tol),
        gap=gap,
    )


def _check_rows(rows) -> None:
    last_t = -math.inf
    for i, row in enumerate(rows):
        values = [row.t, row.area, row.lambda_, row.min_flux, row.max_flux, row.min_curvature]
        if row.gap is not None:
            values.append(row.gap)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"row {i}: refusing to write non-finite values")
        if row.area <= 0.0 or row.lambda_ <= 0.0:
            raise ValueError(f"row {i}: area and lambda must be positive")
        if row.t <= last_t and i > 0:
            raise ValueError(f"row {i}: time must be strictly increasing")
        last_t = row.t


def rows_to_csv(rows) -> str:
    _check_rows(rows)
    lines = [SERIES_HEADER]
    for r in rows:
        gap = "" if r.gap is None else f"{r.gap:.12e}"
        lines.append(
            f"{r.t:.12e},{r.area:.12e},{r.lambda_:.12e},{r.min_flux:.12e},"
            f"{r.max_flux:.12e},{r.min_curvature:.12e},{int(r.convex)},{gap}"
        )
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list[TimeSeriesRow]:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != SERIES_HEADER:
        raise ValueError(f"series CSV must start with the header {SERIES_HEADER!r}")
    rows = []
    for ln in lines[1:]:
        f = ln.split(",")
        rows.append(
            TimeSeriesRow(
                t=float(f[0]),
                area=float(f[1]),
                lambda_=float(f[2]),
                min_flux=float(f[3]),
                max_flux=float(f[4]),
                min_curvature=float(f[5]),
                convex=bool(int(f[6])),
                gap=None if f[7] == "" else float(f[7]),
            )
        )
    return rows


def curve_svg(curve: ClosedCurve, *, chord: np.ndarray | None = None) -> str:
    """Snapshot SVG; non-convex curves get their convex hull overlaid."""
    layers = [(curve.points, {"stroke": "black"})]
    if not is_convex(curve):
        layers.append((convex_hull(curve.points), {"stroke": "red", "dash": "4 3"}))
    if chord is not None:
        layers.append((chord, {"stroke": "blue", "closed": False}))
    return render_svg(layers)


def emit(rows, curves, out_dir, *, report: dict | None = None) -> list[Path]:
    """Write series.csv, per-snapshot curve CSV/SVG files, optional report.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    series = out / "series.csv"
    series.write_text(rows_to_csv(rows), encoding="utf-8")
    written.append(series)

    for idx, curve in enumerate(curves or []):
        base = out / f"curve_{idx:04d}"
        csv_path = base.with_suffix(".csv")
        csv_path.write_text(curve_to_csv(curve), encoding="utf-8")
        svg_path = base.with_suffix(".svg")
        svg_path.write_text(curve_svg(curve), encoding="utf-8")
        written.extend([csv_path, svg_path])

    if report is not None:
        path = out / "report.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(path)
    return written

"""Command-line interface: exact-check, solve, evolve, counterexample."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import counterexample as cx
from . import diagnostics
from .errors import ConfigError, DropletError, IllConditionedSolveError, SearchFailureError, TopologyChangeError
from .evolution import StepperConfig, run
from .exact_solutions import DiskTorsionOracle, TriangleOracle, integral_over_triangle
from .geometry import SQRT3, ClosedCurve, RoundedTriangleSpec, curve_to_csv, make_disk, make_rounded_triangle
from .mobility import parse_law
from .torsion_solver import SolverConfig, normalize, solve_torsion

log = logging.getLogger("droplet")

SHAPE_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "R"],
            "properties": {
                "type": {"const": "disk"},
                "R": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "a"],
            "properties": {
                "type": {"const": "triangle"},
                "a": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "a", "fillet"],
            "properties": {
                "type": {"const": "rounded-triangle"},
                "a": {"type": "number", "exclusiveMinimum": 0},
                "fillet": {"type": "number", "minimum": 0},
            },
        },
    ]
}

SOLVER_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "sources_per_marker": {"type": "integer", "minimum": 1},
        "offset_factor": {"type": "number", "exclusiveMinimum": 0},
        "svd_cutoff": {"type": "number", "exclusiveMinimum": 0},
        "mass_grid_factor": {"type": "number", "exclusiveMinimum": 0},
    },
}

RUN_CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["shape"],
    "properties": {
        "shape": SHAPE_SCHEMA,
        "law": {"type": "string", "pattern": r"^(p2|p3|p:[0-9eE+\-.]+)$"},
        "N": {"type": "integer", "minimum": 8},
        "dt_max": {"type": "number", "exclusiveMinimum": 0},
        "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "t_end": {"type": "number", "minimum": 0},
        "output_every": {"type": "number", "exclusiveMinimum": 0},
        "resample_every": {"type": "integer", "minimum": 1},
        "solver": SOLVER_SCHEMA,
        "out": {"type": "string"},
    },
}

CONFIG_DEFAULTS = {
    "law": "p2",
    "N": 512,
    "dt_max": 1e-3,
    "cfl": 0.4,
    "t_end": 0.05,
    "output_every": 1e-3,
    "resample_every": 5,
    "solver": {},
    "out": "droplet-out",
}


def validate_config(raw: dict) -> dict:
    try:
        jsonschema.validate(raw, RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        field = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config field '{field}': {err.message}") from err
    merged = {**CONFIG_DEFAULTS, **raw}
    merged["solver"] = {**raw.get("solver", {})}
    return merged


def load_config(path: str | None, overrides: dict) -> dict:
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    return validate_config(raw)


def build_shape(shape: dict, n_markers: int) -> ClosedCurve:
    kind = shape["type"]
    if kind == "disk":
        return make_disk(shape["R"], n_markers)
    a = shape["a"]
    fillet = shape.get("fillet", 0.0) if kind == "rounded-triangle" else 0.0
    return make_rounded_triangle(RoundedTriangleSpec(a=a, fillet_radius=fillet, marker_count=n_markers))


def build_solver(cfg: dict) -> SolverConfig:
    return SolverConfig(**cfg.get("solver", {}))


def _print_table(rows) -> bool:
    width = max(len(r[0]) for r in rows) + 2
    all_ok = True
    for name, value, target, ok in rows:
        status = "PASS" if ok else "FAIL"
        all_ok &= ok
        print(f"{name:<{width}} {value:>14.10g} {target:>14.10g}  {status}")
    return all_ok


def cmd_exact_check(args) -> int:
    a = args.a
    oracle = TriangleOracle(a)
    disk = DiskTorsionOracle(1.0)
    rows = []

    for v in oracle.vertices():
        rows.append((f"v({v[0]:g},{v[1]:g})=0", oracle.value(v), 0.0, abs(oracle.value(v)) < 1e-12))
    integral = integral_over_triangle(oracle)
    rows.append(("integral_v=1", integral, 1.0, abs(integral - 1.0) < 1e-8))
    centroid = np.array([0.0, a / SQRT3])
    res = oracle.laplacian_residual(centroid)
    rows.append(("laplacian_residual", res, 0.0, res < 1e-5 * oracle.lambda0))
    grad = oracle.gradient(np.array([0.0, 0.0]))
    rows.append(("v_y(0,0)=3c*a^2", grad[1], 3 * oracle.c * a**2, abs(grad[1] - 3 * oracle.c * a**2) < 1e-12))
    ys = np.linspace(0.0, a * SQRT3, 1000)
    edge = np.stack([(a * SQRT3 - ys) / SQRT3, ys], axis=-1)
    bmax = float(np.abs(oracle.value(edge)).max())
    vmax = oracle.value(np.array([0.0, a / SQRT3]))
    rows.append(("max|v| on boundary", bmax, 0.0, bmax <= 1e-12 * vmax))
    rows.append(("disk mass", disk.mass, np.pi / 8.0, abs(disk.mass - np.pi / 8.0) < 1e-15))
    rows.append(("disk lambda*mass", disk.lambda_ * disk.mass, 1.0, abs(disk.lambda_ * disk.mass - 1.0) < 1e-12))

    ok = _print_table(rows)
    return 0 if ok else 2


def cmd_solve(args) -> int:
    overrides = {"out": args.out, "N": args.N}
    if args.shape is not None:
        shape: dict = {"type": args.shape}
        if args.shape == "disk":
            shape["R"] = args.R if args.R is not None else 1.0
        else:
            shape["a"] = args.a if args.a is not None else 1.0
            if args.shape == "rounded-triangle":
                shape["fillet"] = args.fillet if args.fillet is not None else 0.02
        overrides["shape"] = shape
    cfg = load_config(args.config, overrides)

    curve = build_shape(cfg["shape"], cfg["N"])
    solution = solve_torsion(curve, build_solver(cfg))
    field = normalize(solution)

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    lengths = curve.edge_lengths()
    s = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    lines = ["s,x,y,flux,normalized_gradient"]
    for i, (x, y) in enumerate(curve.points):
        lines.append(
            f"{s[i]:.12e},{x:.12e},{y:.12e},{solution.boundary_flux[i]:.12e},"
            f"{field.boundary_gradient[i]:.12e}"
        )
    (out / "flux.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "curve.csv").write_text(curve_to_csv(curve), encoding="utf-8")
    print(
        f"solved: mass={solution.mass:.10e} lambda={field.lambda_:.10e} "
        f"residual={solution.diagnostics.boundary_residual:.3e}"
    )
    return 0


def cmd_evolve(args) -> int:
    overrides = {
        "out": args.out,
        "N": args.N,
        "law": args.law,
        "dt_max": args.dt_max,
        "cfl": args.cfl,
        "t_end": args.t_end,
        "output_every": args.output_every,
        "resample_every": args.resample_every,
    }
    if args.shape is not None:
        shape: dict = {"type": args.shape}
        if args.shape == "disk":
            shape["R"] = args.R if args.R is not None else 1.0
        else:
            shape["a"] = args.a if args.a is not None else 1.0
            if args.shape == "rounded-triangle":
                shape["fillet"] = args.fillet if args.fillet is not None else 0.02
        overrides["shape"] = shape
    cfg = load_config(args.config, overrides)

    curve = build_shape(cfg["shape"], cfg["N"])
    law = parse_law(cfg["law"])
    stepper = StepperConfig(
        dt_max=cfg["dt_max"],
        t_end=cfg["t_end"],
        output_every=cfg["output_every"],
        cfl=cfg["cfl"],
        resample_every=cfg["resample_every"],
        marker_count=cfg["N"],
        solver=build_solver(cfg),
    )
    trajectory = run(curve, law, stepper)
    rows = [diagnostics.measure(state) for state in trajectory]
    files = diagnostics.emit(rows, [state.curve for state in trajectory], cfg["out"])
    print(f"evolved {len(trajectory)} snapshots; wrote {len(files)} files to {cfg['out']}")
    return 0


def cmd_counterexample(args) -> int:
    law = parse_law(args.law)
    report, trajectory = cx.run_counterexample(
        law,
        a=args.a,
        fillet=args.fillet,
        marker_count=args.N,
        dt_max=args.dt_max,
        t_end=args.t_end,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    series = report.series
    lines = ["t,G,min_curvature,convex_flag"]
    for t, g, k, c in zip(series.times, series.gaps, series.min_curvature, series.convex):
        lines.append(f"{t:.12e},{g:.12e},{k:.12e},{int(c)}")
    (out / "gap.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    picks = sorted({0, len(trajectory) // 2, len(trajectory) - 1})
    for idx in picks:
        state = trajectory[idx]
        chord = np.array(
            [
                [report.x0, series.heights[min(idx, len(series.times) - 1), 0]],
                [report.x1, series.heights[min(idx, len(series.times) - 1), 2]],
            ]
        )
        svg = diagnostics.curve_svg(state.curve, chord=chord)
        (out / f"overlay_{idx:04d}.svg").write_text(svg, encoding="utf-8")

    print(
        f"verdict={report.verdict} t_star={report.t_star} delta={report.delta:.6g} "
        f"slope_quadratic={report.slope_quadratic:.6g}"
    )
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="droplet",
        description="Quasi-static droplet free-boundary simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact-check", help="verify the closed-form oracle identities")
    p.add_argument("--a", type=float, default=1.0, help="triangle half side length (default 1.0)")
    p.set_defaults(func=cmd_exact_check)

    def add_shape_flags(q):
        q.add_argument("--config", help="JSON run config (flags override config values)")
        q.add_argument("--shape", choices=["disk", "triangle", "rounded-triangle"], help="shape type")
        q.add_argument("--R", type=float, help="disk radius (default 1.0)")
        q.add_argument("--a", type=float, help="triangle half side length (default 1.0)")
        q.add_argument("--fillet", type=float, help="corner fillet radius (default 0.02)")
        q.add_argument("--N", type=int, help="marker count (default 512)")
        q.add_argument("--out", help="output directory (default droplet-out)")

    p = sub.add_parser("solve", help="one torsion solve; emits flux.csv and curve.csv")
    add_shape_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evolve", help="front-tracking run; emits series.csv and snapshots")
    add_shape_flags(p)
    p.add_argument("--law", help="mobility law: p2, p3 or p:<value> (default p2)")
    p.add_argument("--dt-max", dest="dt_max", type=float, help="time step cap (default 1e-3)")
    p.add_argument("--cfl", type=float, help="CFL number in (0, 1] (default 0.4)")
    p.add_argument("--t-end", dest="t_end", type=float, help="final time (default 0.05)")
    p.add_argument("--output-every", dest="output_every", type=float, help="snapshot cadence (default 1e-3)")
    p.add_argument("--resample-every", dest="resample_every", type=int, help="resample cadence in steps (default 5)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("counterexample", help="convexity-breaking pipeline; emits report.json, gap.csv, overlays")
    p.add_argument("--law", default="p2", help="mobility law (default p2)")
    p.add_argument("--a", type=float, default=1.0, help="triangle half side length (default 1.0)")
    p.add_argument("--fillet", type=float, default=0.02, help="corner fillet radius (default 0.02)")
    p.add_argument("--N", type=int, default=800, help="marker count (default 800)")
    p.add_argument("--dt-max", dest="dt_max", type=float, default=2e-4, help="time step cap (default 2e-4)")
    p.add_argument("--t-end", dest="t_end", type=float, default=0.02, help="final time (default 0.02)")
    p.add_argument("--out", default="counterexample-out", help="output directory")
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    level = {"debug": logging.DEBUG, "info": logging.INFO}.get(
        os.environ.get("DROPLET_LOG", "").lower(), logging.WARNING
    )
    logging.basicConfig(level=level, format="%(name)s %(levelname)s %(message)s")

    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as err:
        print(f"droplet: validation error: {err}", file=sys.stderr)
        return 1
    except (IllConditionedSolveError, TopologyChangeError, SearchFailureError) as err:
        stage = type(err).__name__.removesuffix("Error")
        print(f"droplet: numerical failure [{stage}]: {err}", file=sys.stderr)
        return 2
    except DropletError as err:
        print(f"droplet: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

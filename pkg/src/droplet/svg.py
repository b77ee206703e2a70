"""Minimal SVG emission for curve snapshots (no plotting dependencies)."""
from __future__ import annotations

import numpy as np

_STYLE_DEFAULTS = {"stroke": "black", "width": 1.0, "dash": None, "closed": True}


def render_svg(layers, pad_frac: float = 0.05, size: int = 640) -> str:
    """Render point layers as stroked paths with an auto-fitted viewBox.

    Each layer is (points, style) with style keys stroke/width/dash/closed.
    The y axis is flipped so the droplet picture matches math orientation.
    """
    layers = [(np.atleast_2d(np.asarray(p, float)), {**_STYLE_DEFAULTS, **(s or {})}) for p, s in layers]
    allpts = np.vstack([p for p, _ in layers])
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = pad_frac * float(span.max())
    x0, y0 = lo[0] - pad, -(hi[1] + pad)
    w, h = span[0] + 2 * pad, span[1] + 2 * pad
    stroke_w = 0.002 * max(w, h)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size * h / w:.0f}" viewBox="{x0:.6g} {y0:.6g} {w:.6g} {h:.6g}">'
    ]
    for pts, style in layers:
        coords = " L ".join(f"{x:.8g} {-y:.8g}" for x, y in pts)
        d = f"M {coords}" + (" Z" if style["closed"] else "")
        dash = f' stroke-dasharray="{style["dash"]}"' if style["dash"] else ""
        parts.append(
            f'<path d="{d}" fill="none" stroke="{style["stroke"]}" '
            f'stroke-width="{style["width"] * stroke_w:.6g}"{dash}/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""Mobility laws mapping contact-line gradient magnitude to normal velocity."""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import InvalidLawError, OutOfDomainError


class MobilityLaw:
    """Scalar law F on (0, inf) with first and second derivatives.

    The callables must accept numpy arrays.  Construction samples a log
    grid to confirm F' > 0 and that F' is consistent with finite
    differences of F; pass validate=False for deliberately degenerate
    test laws (for example F identically zero).
    """

    __slots__ = ("name", "f", "df", "d2f")

    def __init__(self, name, f, df, d2f, *, validate: bool = True):
        self.name = name
        self.f = f
        self.df = df
        self.d2f = d2f
        if validate:
            self._validate()

    def _validate(self) -> None:
        grid = np.logspace(-6, 3, 37)
        if np.any(self.df(grid) <= 0.0):
            raise InvalidLawError(f"law {self.name!r}: F' must be positive on (0, inf)")
        # Derivative consistency on a roundoff-safe sub-grid; additive
        # constants in F make centered differences meaningless near r = 0.
        grid = np.logspace(-3, 3, 25)
        h = 1e-4 * grid
        fd = (self.f(grid + h) - self.f(grid - h)) / (2.0 * h)
        rel = np.abs(fd - self.df(grid)) / np.abs(self.df(grid))
        if np.any(rel > 1e-5):
            raise InvalidLawError(f"law {self.name!r}: F' inconsistent with F")

    def eval(self, r: float) -> tuple[float, float, float]:
        """(F, F', F'') at a single r > 0."""
        if r <= 0.0:
            raise OutOfDomainError("mobility laws are defined on (0, inf)")
        return float(self.f(r)), float(self.df(r)), float(self.d2f(r))

    def __repr__(self) -> str:
        return f"MobilityLaw({self.name!r})"


def power_minus_one(p: float) -> MobilityLaw:
    """The family F(r) = r**p - 1 for p > 1."""
    if p <= 1.0:
        raise ValueError("power_minus_one requires p > 1")
    return MobilityLaw(
        f"p{p:g}",
        lambda r: np.asarray(r, dtype=float) ** p - 1.0,
        lambda r: p * np.asarray(r, dtype=float) ** (p - 1.0),
        lambda r: p * (p - 1.0) * np.asarray(r, dtype=float) ** (p - 2.0),
    )


_LAW_PATTERN = re.compile(r"^p(?:(2|3)|:([0-9eE+\-.]+))$")


def parse_law(spec: str) -> MobilityLaw:
    """CLI law spec: p2, p3, or p:<exponent>."""
    m = _LAW_PATTERN.match(spec.strip())
    if not m:
        raise ValueError(f"unknown law spec {spec!r}; expected p2, p3 or p:<value>")
    p = float(m.group(1) or m.group(2))
    return power_minus_one(p)


@dataclass(frozen=True)
class AssumptionReport:
    satisfied: bool
    inf_ratio: float
    probes: np.ndarray
    ratios: np.ndarray


def check_assumption(
    law: MobilityLaw,
    gamma: float,
    r_probes: np.ndarray | None = None,
    *,
    threshold: float = 1e-2,
) -> AssumptionReport:
    """Certificate-style check of liminf F''/F' >= gamma as r -> 0+.

    Finite probes cannot verify a limit; the heuristic requires the ratio
    to clear gamma at every probe below the threshold and to be
    non-decreasing over the last probed decade.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    probes = np.logspace(-1, -6, 26) if r_probes is None else np.asarray(r_probes, float)
    probes = np.sort(probes)[::-1]
    dvals = law.df(probes)
    if np.any(dvals <= 0.0):
        raise InvalidLawError(f"law {law.name!r}: F' not positive at a probe")
    ratios = law.d2f(probes) / dvals
    small = probes <= threshold
    if not small.any():
        raise ValueError("no probes below the threshold")
    inf_ratio = float(ratios[small].min())
    tail = probes <= 10.0 * probes.min()
    tail_ratios = ratios[tail]  # probes sorted descending: ratio must not drop
    monotone = bool(np.all(np.diff(tail_ratios) >= -1e-12 * np.abs(tail_ratios[:-1])))
    satisfied = bool(np.all(ratios[small] >= gamma)) and monotone
    return AssumptionReport(satisfied, inf_ratio, probes, ratios)

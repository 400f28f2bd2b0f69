"""Random feasible densities for property checks and the ``roundtrip`` command.

Every density drawn here is bounded near the band edges: segments either stay
a margin away from ``a`` and ``b`` or reach them as a constant, a sampled grid,
or a power with positive exponent anchored at the edge.
"""

from __future__ import annotations

import math

import numpy as np

from .density import ConstantSegment, Density, GridSegment, PowerSegment, Segment
from .kernels import Band


def _segment_in(rng: np.random.Generator, lo: float, hi: float, edge: float | None) -> Segment:
    kind = rng.choice(["constant", "power", "grid"]) if edge is not None else rng.choice(["constant", "grid"])
    height = float(rng.uniform(0.1, 2.0))
    if kind == "constant":
        return ConstantSegment(lo, hi, height)
    if kind == "power":
        return PowerSegment(lo, hi, height, float(rng.uniform(0.25, 2.0)), edge)
    n = int(rng.integers(3, 9))
    t = np.linspace(lo, hi, n)
    return GridSegment(t, rng.uniform(0.0, 2.0, n))


def random_feasible_density(
    rng: np.random.Generator,
    band: Band,
    sides: str = "both",
    margin: float = 0.05,
) -> Density:
    """Draw a nonzero density off the band.

    Args:
        rng: numpy generator (seeded by the caller).
        band: the band to avoid.
        sides: ``"left"`` for support in ``(0, a)``, ``"right"`` for ``(b, ∞)``,
            ``"both"`` for either or both.
        margin: minimum gap, as a fraction of the band width, between a band
            edge and a segment that does not reach it.
    """
    a, b = band.a, band.b
    gap = margin * band.width
    want_left = sides in ("left", "both")
    want_right = sides in ("right", "both")
    if sides == "both":
        want_left, want_right = [bool(x) for x in rng.integers(0, 2, 2)]
        if not (want_left or want_right):
            want_left = want_right = True

    segments: list[Segment] = []
    if want_left:
        touch = bool(rng.integers(0, 2))
        hi = a if touch else float(rng.uniform(0.3 * a, a - min(gap, 0.2 * a)))
        lo = float(rng.uniform(0.0, 0.8 * hi))
        segments.append(_segment_in(rng, lo, hi, a if touch else None))
        if lo > 0.2 * a and rng.integers(0, 2):
            segments.append(ConstantSegment(float(rng.uniform(0, 0.5 * lo)), 0.5 * lo + 1e-3 * a, float(rng.uniform(0.1, 2.0))))
    if want_right:
        touch = bool(rng.integers(0, 2))
        lo = b if touch else b + float(rng.uniform(gap, band.width))
        hi = lo + float(rng.uniform(0.2, 1.5)) * band.width
        segments.append(_segment_in(rng, lo, hi, b if touch else None))
        if rng.integers(0, 2):
            start = hi + float(rng.uniform(0.0, 1.0)) * band.width
            if start == hi:
                start = math.nextafter(hi, math.inf)
            gamma = float(rng.uniform(-3.0, -1.0))
            # height at the start of the tail is O(1)
            c = float(rng.uniform(0.1, 2.0)) * (start - b) ** (-gamma)
            segments.append(PowerSegment(start, math.inf, c, gamma, b))
    return Density(tuple(segments))

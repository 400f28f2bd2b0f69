"""Nonnegative loss densities on the positive axis.

A :class:`Density` is an immutable, ordered collection of segments with
pairwise disjoint supports.  Three segment forms cover what the library
needs: constants (bumps, the near-extremal family), powers ``c|t-e|**gamma``
anchored at a point outside the open support (declared endpoint behaviour),
and sampled grids.  Endpoint exponents are carried symbolically so that the
integrability conditions at the band edges are decided exactly rather than by
watching a quadrature diverge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, NonConvergenceError, SupportOverlapError
from .kernels import Band
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadResult,
    integrate_algebraic_weight,
    integrate_smooth,
    integrate_tail,
)


class Segment:
    """Common interface of the segment forms.

    Subclasses expose ``lo``, ``hi`` (``math.inf`` allowed for powers),
    ``values(t)`` for ``t`` inside the support, and the endpoint exponent
    bookkeeping used by the singular integrators.
    """

    lo: float
    hi: float
    kind: str

    def values(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def exponent_at(self, point: float) -> float:
        """Power of ``|t - point|`` the values carry as ``t -> point``."""
        return 0.0

    def regular(self, point: float) -> Callable[[np.ndarray], np.ndarray]:
        """``values(t) / |t - point|**exponent_at(point)``, bounded near ``point``."""
        return self.values

    def limit_at(self, point: float) -> float:
        """One-sided limit of the values at a support endpoint (may be inf)."""
        raise NotImplementedError

    def knots(self) -> np.ndarray | None:
        return None

    def dilate(self, s: float) -> "Segment":
        raise NotImplementedError

    def clip(self, lo: float, hi: float) -> "Segment | None":
        """Restriction to ``(lo, hi)``, or None if empty."""
        nlo, nhi = max(self.lo, lo), min(self.hi, hi)
        if not nlo < nhi:
            return None
        return self._restricted(nlo, nhi)

    def _restricted(self, lo: float, hi: float) -> "Segment":
        raise NotImplementedError

    def touches(self, point: float) -> bool:
        return self.lo == point or self.hi == point


def _check_support(lo: float, hi: float) -> tuple[float, float]:
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and lo >= 0 and lo < hi):
        raise DomainError(f"segment support must satisfy 0 <= lo < hi, got ({lo!r}, {hi!r})")
    return lo, hi


@dataclass(frozen=True)
class ConstantSegment(Segment):
    lo: float
    hi: float
    c: float
    kind: str = field(default="constant", init=False)

    def __post_init__(self):
        lo, hi = _check_support(self.lo, self.hi)
        if not math.isfinite(hi):
            raise DomainError("constant segments must have bounded support")
        if not (math.isfinite(self.c) and self.c >= 0):
            raise DomainError(f"constant value must be finite and nonnegative, got {self.c!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "c", float(self.c))

    def values(self, t):
        return np.full(np.shape(t), self.c)

    def limit_at(self, point):
        return self.c

    def dilate(self, s):
        return ConstantSegment(self.lo * s, self.hi * s, self.c)

    def _restricted(self, lo, hi):
        return ConstantSegment(lo, hi, self.c)


@dataclass(frozen=True)
class PowerSegment(Segment):
    """``c * |t - anchor|**gamma`` on ``(lo, hi)``; the anchor lies outside the open support."""

    lo: float
    hi: float
    c: float
    gamma: float
    anchor: float
    kind: str = field(default="power", init=False)

    def __post_init__(self):
        lo, hi = _check_support(self.lo, self.hi)
        c, gamma, anchor = float(self.c), float(self.gamma), float(self.anchor)
        if not (math.isfinite(c) and c >= 0):
            raise DomainError(f"power coefficient must be finite and nonnegative, got {c!r}")
        if not (math.isfinite(gamma) and math.isfinite(anchor) and anchor >= 0):
            raise DomainError("power exponent and anchor must be finite, anchor >= 0")
        if lo < anchor < hi:
            raise DomainError(f"anchor {anchor:g} lies inside the support ({lo:g}, {hi:g})")
        if anchor in (lo, hi) and not gamma > -1:
            raise DomainError(f"|t - {anchor:g}|^{gamma:g} is not integrable at its anchor")
        if math.isinf(hi) and not gamma <= -1:
            raise DomainError("an unbounded power segment must decay at least like 1/t (gamma <= -1)")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "anchor", anchor)

    def values(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c * np.abs(t - self.anchor) ** self.gamma

    def exponent_at(self, point):
        return self.gamma if point == self.anchor else 0.0

    def regular(self, point):
        if point == self.anchor:
            return lambda t: np.full(np.shape(t), self.c)
        return self.values

    def limit_at(self, point):
        if point == self.anchor:
            if self.gamma > 0:
                return 0.0
            return self.c if self.gamma == 0 else math.inf
        if math.isinf(point):
            return 0.0
        return float(self.values(np.array(point)))

    def dilate(self, s):
        return PowerSegment(self.lo * s, self.hi * s, self.c * s ** (-self.gamma), self.gamma, self.anchor * s)

    def _restricted(self, lo, hi):
        return PowerSegment(lo, hi, self.c, self.gamma, self.anchor)


@dataclass(frozen=True, eq=False)
class GridSegment(Segment):
    """Sampled values on ``t[0] = lo < ... < t[-1] = hi``.

    ``interp="linear"`` is piecewise linear.  ``interp="spline"`` is a cubic
    spline in the angle ``theta`` of ``t = mid - half*cos(theta)``, which
    resolves ``sqrt``-type behaviour at both ends of the support.
    """

    t: np.ndarray
    v: np.ndarray
    interp: str = "linear"
    kind: str = field(default="grid", init=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise DomainError("grid segment needs matching 1-d abscissae and ordinates (>= 2 points)")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise DomainError("grid abscissae and ordinates must be finite")
        if not np.all(np.diff(t) > 0) or t[0] < 0:
            raise DomainError("grid abscissae must be nonnegative and strictly increasing")
        if np.any(v < 0):
            raise DomainError("grid ordinates must be nonnegative")
        if self.interp not in ("linear", "spline"):
            raise DomainError(f"unknown interpolation {self.interp!r}")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        if self.interp == "spline":
            if t.size < 4:
                raise DomainError("spline interpolation needs at least 4 points")
            object.__setattr__(self, "_spline", CubicSpline(self._angle(t), v))

    @property
    def lo(self) -> float:  # type: ignore[override]
        return float(self.t[0])

    @property
    def hi(self) -> float:  # type: ignore[override]
        return float(self.t[-1])

    def _angle(self, x):
        mid, half = 0.5 * (self.t[0] + self.t[-1]), 0.5 * (self.t[-1] - self.t[0])
        return np.arccos(np.clip((mid - np.asarray(x, dtype=float)) / half, -1.0, 1.0))

    def values(self, x):
        x = np.asarray(x, dtype=float)
        if self.interp == "linear":
            return np.interp(x, self.t, self.v)
        # a cubic in theta may dip below zero between nonnegative samples
        return np.clip(self._spline(self._angle(x)), 0.0, None)

    def limit_at(self, point):
        return float(self.v[0] if point == self.lo else self.v[-1])

    def knots(self):
        return self.t if self.interp == "linear" else None

    def dilate(self, s):
        return GridSegment(self.t * s, self.v, self.interp)

    def _restricted(self, lo, hi):
        inner = self.t[(self.t > lo) & (self.t < hi)]
        if self.interp == "spline":
            raise DomainError("spline segments cannot be restricted")
        t = np.concatenate([[lo], inner, [hi]])
        return GridSegment(t, self.values(t), self.interp)

    def __eq__(self, other):
        return (
            isinstance(other, GridSegment)
            and self.interp == other.interp
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.v, other.v)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Density:
    """Immutable nonnegative density; segments are sorted and disjoint."""

    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        segs = tuple(sorted(self.segments, key=lambda s: (s.lo, s.hi)))
        for left, right in zip(segs, segs[1:]):
            if right.lo < left.hi:
                raise SupportOverlapError(
                    f"segments ({left.lo:g}, {left.hi:g}) and ({right.lo:g}, {right.hi:g}) overlap"
                )
        object.__setattr__(self, "segments", segs)

    def __add__(self, other: "Density") -> "Density":
        if not isinstance(other, Density):
            return NotImplemented
        return Density(self.segments + other.segments)

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    @property
    def is_zero(self) -> bool:
        return not self.segments

    def evaluate(self, t):
        """Pointwise value; zero off the supports.

        A point shared by two segments belongs to the left one.
        """
        ta = np.asarray(t, dtype=float)
        out = np.zeros(ta.shape)
        claimed = np.zeros(ta.shape, dtype=bool)
        for seg in self.segments:
            mask = (ta > seg.lo) & (ta <= seg.hi) & ~claimed
            if seg.lo == 0:
                mask |= (ta == 0) & ~claimed
            if mask.any():
                out[mask] = seg.values(ta[mask])
                claimed |= mask
        return float(out) if out.ndim == 0 else out

    def dilate(self, s: float) -> "Density":
        """``t -> v(t / s)``: supports and anchors scale by ``s``."""
        if not s > 0:
            raise DomainError("dilation factor must be positive")
        if s == 1:
            return self
        return Density(tuple(seg.dilate(s) for seg in self.segments))

    def scale(self, m: float) -> "Density":
        """Multiply the values by ``m >= 0``."""
        if not m >= 0:
            raise DomainError("densities can only be scaled by nonnegative factors")
        out = []
        for seg in self.segments:
            if isinstance(seg, ConstantSegment):
                out.append(ConstantSegment(seg.lo, seg.hi, seg.c * m))
            elif isinstance(seg, PowerSegment):
                out.append(PowerSegment(seg.lo, seg.hi, seg.c * m, seg.gamma, seg.anchor))
            else:
                out.append(GridSegment(seg.t, seg.v * m, seg.interp))
        return Density(tuple(out))

    def restricted(self, lo: float, hi: float) -> "Density":
        return Density(tuple(c for c in (s.clip(lo, hi) for s in self.segments) if c is not None))

    def overlaps(self, band: Band) -> list[Segment]:
        return [s for s in self.segments if s.lo < band.b and s.hi > band.a]

    def limit_at(self, point: float, side: str) -> float:
        """One-sided limit at ``point`` from ``side`` ('left' or 'right'); 0 off the supports."""
        for seg in self.segments:
            if side == "left" and seg.hi == point:
                return seg.limit_at(point)
            if side == "right" and seg.lo == point:
                return seg.limit_at(point)
        return 0.0

    def square_integrable(self) -> bool:
        """Symbolic L² check: powers touching their anchor need gamma > -1/2."""
        return all(
            not (isinstance(s, PowerSegment) and s.touches(s.anchor) and s.gamma <= -0.5)
            for s in self.segments
        )


def constant(lo: float, hi: float, c: float = 1.0) -> Density:
    return Density((ConstantSegment(lo, hi, c),))


def power(lo: float, hi: float, c: float, gamma: float, anchor: float) -> Density:
    return Density((PowerSegment(lo, hi, c, gamma, anchor),))


def sampled(t: Sequence[float], v: Sequence[float], interp: str = "linear") -> Density:
    return Density((GridSegment(np.asarray(t, float), np.asarray(v, float), interp),))


# ----------------------------------------------------------------------------
# integration of a density against a kernel


class EdgeWeight(NamedTuple):
    """Kernel factorisation ``k(t) = |t - point|**exponent * regular(t, d)`` near ``point``.

    ``regular`` receives the exact offset ``d = |t - point|`` as well as ``t``.
    """

    point: float
    exponent: float
    regular: Callable[[np.ndarray], np.ndarray]


def integrate_segment(
    seg: Segment,
    kernel: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    edges: Sequence[EdgeWeight] = (),
    kernel_decay: float = 0.0,
) -> QuadResult:
    """``∫ v(t) k(t) dt`` over one segment.

    Support ends that carry an algebraic singularity (from the segment's own
    exponent, from a kernel edge in ``edges``, or both) are integrated with
    the exact power substitution.  A segment singular at both ends is split
    at its midpoint.  Unbounded supports go through the tail integrator with
    decay ``kernel_decay - gamma``.

    ``kernel`` may return shape ``(m, n)``; the result is then per row.
    """

    def singularity(point):
        k_exp, k_reg = 0.0, None
        for e in edges:
            if e.point == point:
                k_exp, k_reg = e.exponent, e.regular
        v_exp = seg.exponent_at(point)
        if k_reg is None and v_exp == 0.0:
            return None
        beta = v_exp + k_exp
        v_reg = seg.regular(point)
        if k_reg is None:
            return beta, lambda t, d: v_reg(t) * kernel(t)
        return beta, lambda t, d: v_reg(t) * k_reg(t, d)

    def full(t):
        return seg.values(t) * kernel(t)

    lo, hi = seg.lo, seg.hi
    knots = seg.knots()
    left = singularity(lo)
    right = singularity(hi) if math.isfinite(hi) else None

    if math.isinf(hi):
        head_end = lo + max(lo, 1.0) if left is not None else lo
        result = None
        if left is not None:
            beta, g = left
            result = integrate_algebraic_weight(g, lo, "right", head_end - lo, beta, cfg, pass_offset=True)
        gamma = seg.gamma if isinstance(seg, PowerSegment) else 0.0
        tail = integrate_tail(full, head_end, kernel_decay - gamma, cfg)
        return tail if result is None else result + tail

    if left is not None and right is not None:
        mid = 0.5 * (lo + hi)
        r1 = integrate_algebraic_weight(left[1], lo, "right", mid - lo, left[0], cfg, knots, True)
        r2 = integrate_algebraic_weight(right[1], hi, "left", hi - mid, right[0], cfg, knots, True)
        return r1 + r2
    if left is not None:
        return integrate_algebraic_weight(left[1], lo, "right", hi - lo, left[0], cfg, knots, True)
    if right is not None:
        return integrate_algebraic_weight(right[1], hi, "left", hi - lo, right[0], cfg, knots, True)
    return integrate_smooth(full, lo, hi, cfg, points=knots)


def integrate_density(
    v: Density,
    kernel: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    edges: Sequence[EdgeWeight] = (),
    kernel_decay: float = 0.0,
) -> QuadResult:
    """Sum of :func:`integrate_segment` over all segments (zero for an empty density)."""
    total = QuadResult(0.0, 0.0)
    for seg in v.segments:
        total = total + integrate_segment(seg, kernel, cfg, edges=edges, kernel_decay=kernel_decay)
    return total


# ----------------------------------------------------------------------------
# feasibility


class Verdict(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    UNDECIDABLE = "undecidable-numerically"


@dataclass(frozen=True)
class ConditionResult:
    verdict: Verdict
    value: float | None = None
    error: float | None = None

    @property
    def satisfied(self) -> bool:
        return self.verdict is Verdict.SATISFIED

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "value": self.value, "error": self.error}


@dataclass(frozen=True)
class FeasibilityReport:
    condition_one: ConditionResult
    corollary_condition: ConditionResult
    notes: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.condition_one.satisfied

    def to_dict(self) -> dict:
        return {
            "condition_one": self.condition_one.to_dict(),
            "corollary_condition": self.corollary_condition.to_dict(),
            "notes": list(self.notes),
        }


def require_off_band(v: Density, band: Band) -> None:
    bad = v.overlaps(band)
    if bad:
        spans = ", ".join(f"({s.lo:g}, {s.hi:g})" for s in bad)
        raise SupportOverlapError(f"density support {spans} intersects the open band ({band.a:g}, {band.b:g})")


def _edge_segments(v: Density, band: Band):
    """Yield (segment, edge) for segments whose closure reaches a band edge."""
    for seg in v.segments:
        if seg.hi == band.a:
            yield seg, band.a
        elif seg.lo == band.b:
            yield seg, band.b


def _edge_exponent_violations(v: Density, band: Band) -> list[str]:
    notes = []
    for seg, edge in _edge_segments(v, band):
        gamma = seg.exponent_at(edge)
        if gamma <= -0.5:
            name = "a" if edge == band.a else "b"
            notes.append(
                f"{seg.kind} segment ({seg.lo:g}, {seg.hi:g}) has exponent {gamma:g} <= -1/2 at {name}={edge:g}"
            )
    return notes


def _edge_windows(v: Density, band: Band):
    """The two one-sided windows of length ``a`` at the band edges, per side."""
    left = v.restricted(0.0, band.a)
    right = v.restricted(band.b, band.b + band.a)
    return left, right


def _ones(t, d=None):
    return np.ones(np.shape(t))


def condition_one_integral(v: Density, band: Band, cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadResult:
    """``∫_0^a [v(a - t) + v(b + t)] t**-1/2 dt`` (assumes the exponent test passed)."""
    left, right = _edge_windows(v, band)

    def kernel(t):
        return 1.0 / np.sqrt(np.minimum(np.abs(t - band.a), np.abs(t - band.b)))

    return (
        integrate_density(left, kernel, cfg, edges=(EdgeWeight(band.a, -0.5, _ones),))
        + integrate_density(right, kernel, cfg, edges=(EdgeWeight(band.b, -0.5, _ones),))
    )


def _log_form(window: Density, edge: float, cfg: QuadratureConfig) -> QuadResult:
    """``∫∫ nu(t) nu(tau) |log(|t-e| + |tau-e|)| / sqrt(|t-e| |tau-e|)`` over one window."""
    inner_cfg = cfg.with_overrides(rel_tol=max(cfg.rel_tol, 1e-9))
    outer_cfg = cfg.with_overrides(rel_tol=max(cfg.rel_tol, 1e-8))

    def inner(tau):
        # one row per outer abscissa; offsets tau are exact
        def log_reg(t, d):
            return np.abs(np.log(d[None, :] + tau[:, None]))

        def kern(t):
            d = np.abs(t - edge)
            return log_reg(t, d) / np.sqrt(d)[None, :]

        return integrate_density(window, kern, inner_cfg, edges=(EdgeWeight(edge, -0.5, log_reg),)).value

    def outer(t):
        d = np.abs(t - edge)
        return inner(d) / np.sqrt(d)

    return integrate_density(window, outer, outer_cfg, edges=(EdgeWeight(edge, -0.5, lambda t, d: inner(d)),))


def corollary_integral(v: Density, band: Band, cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadResult:
    """The log-strengthened endpoint condition, as a double integral over both edge windows.

    The inner integral is vectorised over the outer abscissae, so one outer
    rule application costs one shared-mesh inner integration.
    """
    left, right = _edge_windows(v, band)
    total = QuadResult(0.0, 0.0)
    for window, edge in ((left, band.a), (right, band.b)):
        if not window.is_zero:
            total = total + _log_form(window, edge, cfg)
    return total


def check_feasibility(v: Density, band: Band, cfg: QuadratureConfig = DEFAULT_CONFIG) -> FeasibilityReport:
    """Decide the endpoint integrability condition and the log-strengthened variant.

    Verdicts are symbolic: a support reaching a band edge with exponent
    ``gamma <= -1/2`` there violates both conditions, anything bounded near
    the edges satisfies both (the log factor changes no power threshold).
    Values are attached when finite; a quadrature failure on a symbolically
    satisfied condition is reported as undecidable-numerically.

    Raises:
        SupportOverlapError: if a segment intersects the open band.
    """
    require_off_band(v, band)
    notes = _edge_exponent_violations(v, band)
    if notes:
        bad = ConditionResult(Verdict.VIOLATED)
        return FeasibilityReport(bad, bad, tuple(notes))

    results = []
    extra = []
    for name, fn in (("endpoint condition", condition_one_integral), ("log condition", corollary_integral)):
        try:
            value, error = fn(v, band, cfg)
            results.append(ConditionResult(Verdict.SATISFIED, float(value), float(error)))
        except NonConvergenceError as exc:
            results.append(ConditionResult(Verdict.UNDECIDABLE, None, None))
            extra.append(f"{name}: {exc}")
    if not results[0].satisfied and results[1].satisfied:
        # the log condition is the stronger one; never report it alone
        results[1] = ConditionResult(Verdict.UNDECIDABLE, results[1].value, results[1].error)
    return FeasibilityReport(results[0], results[1], tuple(extra))

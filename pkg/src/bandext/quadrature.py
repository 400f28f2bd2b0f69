"""Singular integration primitives.

Everything funnels into one adaptive Gauss-Kronrod (10/21) engine with
QUADPACK-style nested-rule error estimates.  Singular integrands are first
transformed into smooth ones:

* endpoint algebraic singularities ``|t - e|**beta`` by the exact substitution
  ``|t - e| = s**(1 / (beta + 1))`` (``t = e ± s²`` for inverse square roots),
* principal-value poles by subtracting ``f(pole)`` and folding the window
  around the pole into a symmetric difference,
* semi-infinite ranges by ``u = 1 / t`` beyond a cutoff.

Integrands are called with 1-d arrays of abscissae.  They may return an
array of the same shape, or of shape ``(m, n)`` to integrate ``m`` functions
on a shared mesh; results then carry shape ``(m,)``.  The engine does no
extrapolation, so the unweighted rule reports non-convergence on an endpoint
singularity instead of quietly absorbing it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from .errors import DecayViolationError, DomainError, NonConvergenceError

_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980626644,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full symmetric 21-point rule on [-1, 1]
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and singular-handling knobs for every integrator.

    ``pv_window`` is the absolute half-width of the symmetric fold around a
    principal-value pole; ``tail_cutoff_factor`` multiplies the lower limit of
    a semi-infinite range to give the point where ``u = 1/t`` takes over.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2**14
    tail_cutoff_factor: float = 64.0
    pv_window: float = 1e-3

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.pv_window > 0):
            raise DomainError("rel_tol, abs_tol and pv_window must be positive")
        if self.tail_cutoff_factor < 4:
            raise DomainError("tail_cutoff_factor must be at least 4")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be a positive integer")

    def with_overrides(self, **kwargs) -> "QuadratureConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_CONFIG = QuadratureConfig()


class QuadResult(NamedTuple):
    value: float | np.ndarray
    error: float | np.ndarray

    def __add__(self, other):  # type: ignore[override]
        if isinstance(other, QuadResult):
            return QuadResult(self.value + other.value, self.error + other.error)
        return NotImplemented

    def scaled(self, c) -> "QuadResult":
        return QuadResult(self.value * c, self.error * np.abs(c))


def _rule(f, lo: np.ndarray, hi: np.ndarray):
    """Apply the 21-point pair on each interval; returns (K, err, floor) as (m, n)."""
    half = 0.5 * (hi - lo)
    center = 0.5 * (hi + lo)
    t = center[:, None] + half[:, None] * NODES[None, :]
    fv = np.asarray(f(t.ravel()), dtype=float)
    n = lo.size
    fv = fv.reshape(-1, n, 21)
    if not np.all(np.isfinite(fv)):
        raise NonConvergenceError("integrand returned a non-finite value")
    kron = fv @ KRONROD_WEIGHTS
    gauss = fv @ GAUSS_WEIGHTS
    mean = 0.5 * kron
    resabs = np.abs(fv) @ KRONROD_WEIGHTS
    resasc = np.abs(fv - mean[..., None]) @ KRONROD_WEIGHTS

    h = np.abs(half)[None, :]
    kron, resabs, resasc = kron * half, resabs * h, resasc * h
    err = np.abs(gauss * half - kron)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(err, floor)
    return kron, err, floor


def _partition(lo: float, hi: float, points) -> np.ndarray:
    edges = [lo, hi]
    if points is not None:
        p = np.asarray(points, dtype=float).ravel()
        edges.extend(p[(p > lo) & (p < hi)])
    return np.unique(np.asarray(edges, dtype=float))


def _adaptive(f: Callable, lo: float, hi: float, cfg: QuadratureConfig, points=None) -> QuadResult:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("finite limits required; use integrate_tail for infinite ranges")
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo!r}, {hi!r}]")

    edges = _partition(lo, hi, points)
    los = edges[:-1].copy()
    his = edges[1:].copy()
    vals, errs, floors = _rule(f, los, his)
    scalar = np.ndim(f(np.array([0.5 * (lo + hi)]))) == 1
    min_width = 4.0 * _EPS * max(abs(lo), abs(hi), hi - lo)

    while True:
        total = vals.sum(axis=1)
        err_total = errs.sum(axis=1)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        pending = err_total > tol
        if not pending.any():
            break

        split = np.zeros(los.size, dtype=bool)
        for j in np.flatnonzero(pending):
            eligible = errs[j] > floors[j] * 1.0001
            if not eligible.any():
                continue  # roundoff limited: nothing left to refine for this row
            e = np.where(eligible, errs[j], 0.0)
            order = np.argsort(-e, kind="stable")
            remaining = err_total[j] - np.cumsum(e[order])
            k = int(np.searchsorted(-remaining, -0.5 * tol[j]))
            split[order[: min(k + 1, int(eligible.sum()))]] = True
        if not split.any():
            break

        widths = his[split] - los[split]
        if los.size + int(split.sum()) > cfg.max_subdivisions or np.any(widths < min_width):
            why = (
                "subdivision budget exhausted"
                if los.size + int(split.sum()) > cfg.max_subdivisions
                else "intervals shrank to machine resolution"
            )
            value, error = (total[0], err_total[0]) if scalar else (total, err_total)
            raise NonConvergenceError(
                f"adaptive quadrature on [{lo:g}, {hi:g}] did not converge ({why}); "
                f"error estimate {np.max(err_total):.3g} above tolerance {np.max(tol):.3g}",
                value=value,
                error=error,
            )

        mid = 0.5 * (los[split] + his[split])
        new_lo = np.concatenate([los[split], mid])
        new_hi = np.concatenate([mid, his[split]])
        nv, ne, nf = _rule(f, new_lo, new_hi)
        keep = ~split
        los = np.concatenate([los[keep], new_lo])
        his = np.concatenate([his[keep], new_hi])
        vals = np.concatenate([vals[:, keep], nv], axis=1)
        errs = np.concatenate([errs[:, keep], ne], axis=1)
        floors = np.concatenate([floors[:, keep], nf], axis=1)

    total = vals.sum(axis=1)
    err_total = errs.sum(axis=1)
    if scalar:
        return QuadResult(float(total[0]), float(err_total[0]))
    return QuadResult(total, err_total)


def _vectorize(f: Callable) -> Callable:
    """Wrap scalar-only callables so the engine can pass arrays."""

    def wrapped(t):
        try:
            with warnings.catch_warnings():
                # numpy warns when a size-1 array is coerced to a scalar
                warnings.simplefilter("error", DeprecationWarning)
                out = f(t)
        except (TypeError, ValueError, DeprecationWarning):
            return np.array([f(float(ti)) for ti in t])
        out = np.asarray(out, dtype=float)
        if out.ndim == 0:
            out = np.full(np.shape(t), float(out))
        return out

    return wrapped


def integrate_smooth(
    f: Callable, lo: float, hi: float, cfg: QuadratureConfig = DEFAULT_CONFIG, points=None
) -> QuadResult:
    """Adaptive integral of a continuous integrand over ``[lo, hi]``.

    ``points`` seeds the initial mesh (kinks, known features).

    Raises:
        NonConvergenceError: if the subdivision budget is exhausted, or the
            mesh collapses onto a point (typical for an unweighted endpoint
            singularity).
    """
    return _adaptive(_vectorize(f), float(lo), float(hi), cfg, points)


def integrate_algebraic_weight(
    g: Callable,
    endpoint: float,
    side: str,
    length: float,
    exponent: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    points=None,
    pass_offset: bool = False,
) -> QuadResult:
    """Integral of ``|t - endpoint|**exponent * g(t)`` over a one-sided interval.

    ``side="right"`` integrates over ``[endpoint, endpoint + length]``,
    ``side="left"`` over ``[endpoint - length, endpoint]``.  With
    ``|t - e| = s**p``, ``p = 1 / (exponent + 1)``, the weight and Jacobian
    cancel to the constant ``p``.

    With ``pass_offset=True`` the integrand is called as ``g(t, d)`` where
    ``d = |t - endpoint|`` is exact; ``t`` itself cannot resolve offsets much
    below ``eps * |endpoint|``.
    """
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if not length > 0:
        raise DomainError("length must be positive")
    if not exponent > -1:
        raise DomainError(f"weight |t-e|^{exponent} is not integrable at the endpoint")
    p = 1.0 / (exponent + 1.0)
    sign = 1.0 if side == "right" else -1.0
    e = float(endpoint)
    if pass_offset:
        call = g
    else:
        g1 = _vectorize(g)

        def call(t, d):
            return g1(t)

    if p == 1.0:
        def h(s):
            return call(e + sign * s, s)
    elif p == 2.0:
        def h(s):
            d = s * s
            return 2.0 * call(e + sign * d, d)
    else:
        def h(s):
            d = s**p
            return p * call(e + sign * d, d)

    if points is not None:
        d = np.abs(np.asarray(points, dtype=float) - e)
        points = d ** (1.0 / p)
    return _adaptive(h, 0.0, float(length) ** (1.0 / p), cfg, points)


def integrate_sqrt_weight(
    g: Callable, endpoint: float, side: str, length: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> QuadResult:
    """Integral of ``g(t) / sqrt(|t - endpoint|)`` via ``t = endpoint ± s²``."""
    return integrate_algebraic_weight(g, endpoint, side, length, -0.5, cfg)


def integrate_pv(
    f: Callable, pole: float, lo: float, hi: float, cfg: QuadratureConfig = DEFAULT_CONFIG, points=None
) -> QuadResult:
    """Principal value of ``∫ f(t) / (t - pole) dt`` over ``[lo, hi]``.

    ``f(pole)`` is subtracted and contributes ``f(pole) * log((hi-pole)/(pole-lo))``
    exactly.  The remainder is regular; within ``pv_window`` of the pole it is
    folded into ``(f(pole+s) - f(pole-s)) / s`` so no abscissa comes near a
    0/0 form.

    Raises:
        DomainError: if ``pole`` is not strictly inside ``(lo, hi)``.
    """
    lo, hi, pole = float(lo), float(hi), float(pole)
    if not lo < pole < hi:
        raise DomainError(f"pole {pole!r} must lie strictly inside ({lo!r}, {hi!r})")
    f = _vectorize(f)
    fp = np.asarray(f(np.array([pole])), dtype=float)[..., 0]
    w = min(cfg.pv_window, pole - lo, hi - pole)

    def folded(s):
        return (f(pole + s) - f(pole - s)) / s

    def subtracted(t):
        fv = f(t)
        return (fv - fp[..., None]) / (t - pole)

    result = _adaptive(folded, 0.0, w, cfg)
    if pole - w > lo:
        result = result + _adaptive(subtracted, lo, pole - w, cfg, points)
    if pole + w < hi:
        result = result + _adaptive(subtracted, pole + w, hi, cfg, points)
    log_term = fp * math.log((hi - pole) / (pole - lo))
    if np.ndim(result.value) == 0:
        log_term = float(log_term)
    return QuadResult(result.value + log_term, result.error)


def integrate_tail(
    f: Callable, lo: float, decay_power: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> QuadResult:
    """``∫_lo^∞ f(t) dt`` for ``f = O(t**-decay_power)``, ``decay_power >= 2``.

    The range up to ``tail_cutoff_factor * lo`` is integrated directly, the
    rest after ``u = 1/t``, where the integrand becomes ``f(1/u) / u²``.

    Raises:
        DomainError: if ``decay_power < 2`` or ``lo <= 0``.
        DecayViolationError: if ``f(1/u) / u²`` is found to blow up as u -> 0.
    """
    if not decay_power >= 2:
        raise DomainError(f"integrate_tail requires decay_power >= 2, got {decay_power!r}")
    lo = float(lo)
    if not lo > 0:
        raise DomainError("integrate_tail requires lo > 0")
    f = _vectorize(f)
    cutoff = cfg.tail_cutoff_factor * lo
    umax = 1.0 / cutoff

    def substituted(u):
        return f(1.0 / u) / (u * u)

    probes = umax * np.array([1e-3, 1e-6, 1e-9])
    with np.errstate(over="ignore", invalid="ignore"):
        q = np.abs(np.asarray(substituted(probes), dtype=float)).reshape(-1, 3).max(axis=0)
    if not np.all(np.isfinite(q)) or q[2] > 10.0 * q[1] + _TINY or q[1] > 10.0 * q[0] + _TINY:
        raise DecayViolationError(
            "integrand does not decay like t**-2 at infinity; the substituted tail is unbounded"
        )

    return _adaptive(f, lo, cutoff, cfg) + _adaptive(substituted, 0.0, umax, cfg)

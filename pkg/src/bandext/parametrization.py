"""Completion of an off-band loss density onto the band.

Given a nonnegative ``v`` on ``(0, a] ∪ [b, ∞)``:

* :func:`alpha_functional` is the real-part level
  ``(2/π) ∫ t v(t) sigma(t) dt`` over the off-band support,
* :func:`extend` computes, for ``x`` in ``(a, b)``,
  ``(1/π) ∫ v(t) sigma(t) 2t/(t² - x²) dt / |sigma(x)|`` -- the unique values
  on the band that make the half-line Hilbert transform constant there,
* :func:`hilbert_full` is the half-line operator
  ``PV (1/π) ∫_0^∞ v(t) (1/(t - x) + 1/(t + x)) dt`` used to close the loop,
* :func:`verify_constancy` measures the level both ways.

Off the band ``t² - x²`` never vanishes for ``x`` inside it, so the extension
needs no principal value; the ``1/sqrt`` edge singularities of sigma go
through the weighted integrator with exact offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .density import (
    Density,
    EdgeWeight,
    GridSegment,
    PowerSegment,
    Segment,
    integrate_density,
    integrate_segment,
    require_off_band,
)
from .errors import DomainError, InfeasibleDensityError
from .kernels import Band
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    QuadResult,
    integrate_algebraic_weight,
    integrate_pv,
    integrate_smooth,
)


def _sign(t, band: Band):
    return np.where(t < band.a, -1.0, 1.0)


def _sigma(t, band: Band):
    """Real sigma off the band (negative left of it)."""
    t2 = t * t
    return _sign(t, band) / np.sqrt(np.abs(band.b**2 - t2) * np.abs(t2 - band.a**2))


def _sigma_reg_a(t, band: Band):
    """``sigma(t) * sqrt(a - t)`` for ``t < a``."""
    return -1.0 / (np.sqrt(band.b**2 - t * t) * np.sqrt(t + band.a))


def _sigma_reg_b(t, band: Band):
    """``sigma(t) * sqrt(t - b)`` for ``t > b``."""
    return 1.0 / (np.sqrt(t + band.b) * np.sqrt(t * t - band.a**2))


def _ensure_feasible(v: Density, band: Band, cfg: QuadratureConfig) -> None:
    require_off_band(v, band)
    report = check_feasibility_symbolic(v, band)
    if report:
        raise InfeasibleDensityError("; ".join(report))


def check_feasibility_symbolic(v: Density, band: Band) -> list[str]:
    """Endpoint exponent test only (no quadrature); returns violation notes."""
    notes = []
    for seg in v.segments:
        for edge in (band.a, band.b):
            if seg.touches(edge) and seg.exponent_at(edge) <= -0.5:
                notes.append(
                    f"segment ({seg.lo:g}, {seg.hi:g}) behaves like |t-{edge:g}|^{seg.exponent_at(edge):g} "
                    "at a band edge; the endpoint integrability condition fails"
                )
    return notes


def alpha_integral(v: Density, band: Band, cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadResult:
    """Level ``(2/π) ∫ t v(t) sigma(t) dt`` with its quadrature error estimate."""
    _ensure_feasible(v, band, cfg)
    c = 2.0 / math.pi

    def kernel(t):
        return c * t * _sigma(t, band)

    edges = (
        EdgeWeight(band.a, -0.5, lambda t, d: c * t * _sigma_reg_a(t, band)),
        EdgeWeight(band.b, -0.5, lambda t, d: c * t * _sigma_reg_b(t, band)),
    )
    return integrate_density(v, kernel, cfg, edges=edges, kernel_decay=1.0)


def alpha_functional(v: Density, band: Band, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Real-part level on the band produced by the off-band density ``v``.

    Negative contributions come from ``(0, a)``, positive ones from ``(b, ∞)``.

    Raises:
        SupportOverlapError: if ``v`` reaches into the open band.
        InfeasibleDensityError: if ``v`` is too singular at a band edge.
    """
    return float(alpha_integral(v, band, cfg).value)


def chebyshev_angles(n: int) -> np.ndarray:
    return math.pi * (np.arange(n) + 0.5) / n


def band_grid(band: Band, n: int):
    """Chebyshev points in ``(a, b)`` with exact offsets from both edges.

    Returns ``(x, x - a, b - x)``; the offsets are formed from half-angle
    sines so that points near the edges keep full relative precision.
    """
    if n < 1:
        raise DomainError("grid size must be positive")
    theta = chebyshev_angles(n)
    half = 0.5 * band.width
    da = 2.0 * half * np.sin(0.5 * theta) ** 2
    db = 2.0 * half * np.cos(0.5 * theta) ** 2
    x = np.where(da <= db, band.a + da, band.b - db)
    return x, da, db


def _abs_sigma_offsets(x, da, db, band: Band):
    return 1.0 / np.sqrt(db * (band.b + x) * da * (x + band.a))


def _hilbert_sigma_v(v: Density, band: Band, x, da, db, cfg: QuadratureConfig) -> QuadResult:
    """``(1/π) ∫ v sigma 2t/(t² - x²) dt`` for every ``x`` in ``(a, b)`` at once."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    da = np.atleast_1d(da)
    db = np.atleast_1d(db)
    c = 1.0 / math.pi

    def kernel(t):
        t = t[None, :]
        return c * _sigma(t, band) * 2.0 * t / ((t - x[:, None]) * (t + x[:, None]))

    def reg_a(t, d):
        # t = a - d < a < x:  t - x = -(d + (x - a))
        t2, d2 = t[None, :], d[None, :]
        return c * _sigma_reg_a(t2, band) * 2.0 * t2 / (-(d2 + da[:, None]) * (t2 + x[:, None]))

    def reg_b(t, d):
        # t = b + d > b > x:  t - x = d + (b - x)
        t2, d2 = t[None, :], d[None, :]
        return c * _sigma_reg_b(t2, band) * 2.0 * t2 / ((d2 + db[:, None]) * (t2 + x[:, None]))

    edges = (EdgeWeight(band.a, -0.5, reg_a), EdgeWeight(band.b, -0.5, reg_b))
    return integrate_density(v, kernel, cfg, edges=edges, kernel_decay=3.0)


@dataclass(frozen=True, eq=False)
class ExtensionResult:
    """Completed values of a density on the band.

    ``values[i]`` is the extension at ``grid[i]``; ``edge_values`` are the
    pinned values at ``a`` and ``b`` used for interpolation (the one-sided
    limits of the off-band density), ``edges_resolved`` is False when such a
    limit is infinite and the pins are extrapolated instead.
    """

    band: Band
    alpha: float
    alpha_error: float
    grid: np.ndarray
    values: np.ndarray
    error_estimates: np.ndarray
    edge_values: tuple[float, float] = (0.0, 0.0)
    edges_resolved: bool = True
    _segment: GridSegment | None = field(default=None, repr=False)

    @property
    def sup_norm(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    @property
    def max_error(self) -> float:
        return float(self.error_estimates.max()) if self.error_estimates.size else 0.0

    def interpolant(self, scale: float = 1.0) -> GridSegment:
        """Cubic spline in the Chebyshev angle through the grid and pinned edges."""
        if scale == 1.0 and self._segment is not None:
            return self._segment
        t = np.concatenate([[self.band.a], self.grid, [self.band.b]])
        vals = np.concatenate([[self.edge_values[0]], self.values, [self.edge_values[1]]])
        seg = GridSegment(t, np.clip(vals, 0.0, None) * scale, interp="spline")
        if scale == 1.0:
            object.__setattr__(self, "_segment", seg)
        return seg

    def completed(self, v: Density, scale: float = 1.0) -> Density:
        """``v`` off the band joined with the interpolated extension on it."""
        return v + Density((self.interpolant(scale),))

    def lp_norm(self, p: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
        """``‖extension‖_p`` over the band, from the interpolant; ``p=inf`` is the grid maximum."""
        if math.isinf(p):
            return self.sup_norm
        seg = self.interpolant()
        half = 0.5 * self.band.width
        mid = self.band.midpoint

        def integrand(theta):
            # x = mid - half cos(theta) keeps the sqrt edges smooth
            return seg.values(mid - half * np.cos(theta)) ** p * half * np.sin(theta)

        return float(integrate_smooth(integrand, 0.0, math.pi, cfg).value) ** (1.0 / p)

    def to_dict(self) -> dict:
        return {
            "band": [self.band.a, self.band.b],
            "alpha": self.alpha,
            "alpha_error": self.alpha_error,
            "sup_norm": self.sup_norm,
            "edge_values": list(self.edge_values),
            "edges_resolved": self.edges_resolved,
            "grid": self.grid.tolist(),
            "values": self.values.tolist(),
            "error_estimates": self.error_estimates.tolist(),
        }


def extension_at(v: Density, band: Band, x, cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadResult:
    """Extension values (and error estimates) at arbitrary points strictly inside the band."""
    _ensure_feasible(v, band, cfg)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all((x > band.a) & (x < band.b)):
        raise DomainError("extension points must lie strictly inside the band")
    da, db = x - band.a, band.b - x
    if v.is_zero:
        return QuadResult(np.zeros(x.size), np.zeros(x.size))
    h, h_err = _hilbert_sigma_v(v, band, x, da, db, cfg)
    inv = 1.0 / _abs_sigma_offsets(x, da, db, band)
    return QuadResult(np.asarray(h) * inv, np.asarray(h_err) * inv)


def _edge_pin(v: Density, band: Band, values: np.ndarray, grid: np.ndarray, side: str):
    point = band.a if side == "left" else band.b
    limit = v.limit_at(point, side)
    if math.isfinite(limit):
        return limit, True
    # linear extrapolation from the two nearest grid points in the angle variable
    k = (0, 1) if side == "left" else (-1, -2)
    return max(0.0, 2 * values[k[0]] - values[k[1]]), False


def extend(
    v: Density, band: Band, grid_size: int = 256, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> ExtensionResult:
    """Extension of ``v`` onto the band at ``grid_size`` Chebyshev points.

    Raises:
        SupportOverlapError: if ``v`` reaches into the open band.
        InfeasibleDensityError: if ``v`` is too singular at a band edge.
        NonConvergenceError: if a quadrature fails.
    """
    if grid_size < 1:
        raise DomainError("grid_size must be positive")
    _ensure_feasible(v, band, cfg)
    x, da, db = band_grid(band, grid_size)
    a_val, a_err = alpha_integral(v, band, cfg)

    if v.is_zero:
        values = np.zeros(grid_size)
        errors = np.zeros(grid_size)
    else:
        h, h_err = _hilbert_sigma_v(v, band, x, da, db, cfg)
        inv = 1.0 / _abs_sigma_offsets(x, da, db, band)
        values = np.asarray(h) * inv
        errors = np.asarray(h_err) * inv

    lo_pin, lo_ok = _edge_pin(v, band, values, x, "left")
    hi_pin, hi_ok = _edge_pin(v, band, values, x, "right")
    return ExtensionResult(
        band=band,
        alpha=float(a_val),
        alpha_error=float(a_err),
        grid=x,
        values=values,
        error_estimates=errors,
        edge_values=(float(lo_pin), float(hi_pin)),
        edges_resolved=lo_ok and hi_ok,
    )


def _hilbert_segment(seg: Segment, x: float, cfg: QuadratureConfig) -> QuadResult:
    """``(1/π) PV ∫_seg v(t) 2t/(t² - x²) dt``."""
    c = 1.0 / math.pi
    if not (seg.lo < x < seg.hi):

        def kernel(t):
            return c * 2.0 * t / ((t - x) * (t + x))

        return integrate_segment(seg, kernel, cfg, kernel_decay=1.0)

    def f(t):
        return c * seg.values(t) * 2.0 * t / (t + x)

    knots = seg.knots()
    pv_lo, pv_hi = seg.lo, seg.hi
    total = QuadResult(0.0, 0.0)
    # an algebraic endpoint next to the pole: split halfway, one singularity per piece
    for end, side in ((seg.lo, "right"), (seg.hi, "left")):
        if math.isfinite(end) and seg.exponent_at(end) != 0.0:
            mid = 0.5 * (end + x)
            reg = seg.regular(end)
            total = total + integrate_algebraic_weight(
                lambda t, reg=reg: c * reg(t) * 2.0 * t / ((t - x) * (t + x)),
                end, side, abs(mid - end), seg.exponent_at(end), cfg, points=knots,
            )
            if side == "right":
                pv_lo = mid
            else:
                pv_hi = mid
    if math.isinf(pv_hi):
        if not isinstance(seg, PowerSegment):
            raise DomainError("only power segments may be unbounded")
        cut = 2.0 * x
        tail_seg = PowerSegment(cut, math.inf, seg.c, seg.gamma, seg.anchor)
        total = total + integrate_segment(
            tail_seg, lambda t: c * 2.0 * t / ((t - x) * (t + x)), cfg, kernel_decay=1.0
        )
        pv_hi = cut
    return total + integrate_pv(f, x, pv_lo, pv_hi, cfg, points=knots)


def hilbert_full(v_full: Density, x: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Half-line Hilbert operator of a density defined on all of ``(0, ∞)``."""
    return float(hilbert_full_with_error(v_full, x, cfg).value)


def hilbert_full_with_error(v_full: Density, x: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadResult:
    x = float(x)
    if not x > 0:
        raise DomainError("the half-line operator is evaluated at x > 0")
    for seg in v_full.segments:
        if x == seg.lo or x == seg.hi:
            raise DomainError(f"x={x:g} sits on a segment boundary")
    total = QuadResult(0.0, 0.0)
    for seg in v_full.segments:
        total = total + _hilbert_segment(seg, x, cfg)
    return total


@dataclass(frozen=True)
class ConstancyReport:
    alpha: float
    alpha_measured: float
    max_deviation: float
    check_points: np.ndarray
    hilbert_values: np.ndarray
    hilbert_errors: np.ndarray
    interpolation_resolved: bool = True

    def passes(self, tol: float) -> bool:
        """Relative criterion ``max_deviation <= tol * max(1, |alpha|)``, net of quadrature error."""
        slack = float(self.hilbert_errors.max()) if self.hilbert_errors.size else 0.0
        return self.max_deviation <= tol * max(1.0, abs(self.alpha)) + slack

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "alpha_measured": self.alpha_measured,
            "max_deviation": self.max_deviation,
            "check_points": self.check_points.tolist(),
            "hilbert_values": self.hilbert_values.tolist(),
            "hilbert_errors": self.hilbert_errors.tolist(),
            "interpolation_resolved": self.interpolation_resolved,
        }


def check_points(band: Band, grid_size: int, n_check: int) -> np.ndarray:
    """``n_check`` points spread over the band, each halfway (in angle) between grid nodes."""
    if not 1 <= n_check < grid_size:
        raise DomainError("need 1 <= n_check < grid_size")
    k = np.round((np.arange(n_check) + 1) * grid_size / (n_check + 1)).astype(int)
    k = np.clip(k, 1, grid_size - 1)
    theta = math.pi * k / grid_size
    return band.midpoint - 0.5 * band.width * np.cos(theta)


def verify_constancy(
    v: Density,
    band: Band,
    n_check: int = 17,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    grid_size: int = 256,
    perturb: float = 1.0,
    extension: ExtensionResult | None = None,
) -> ConstancyReport:
    """Round trip: extend, complete, and evaluate the Hilbert operator on the band.

    ``perturb`` scales the completed on-band values; anything other than 1
    should break constancy (negative control).
    """
    res = extension if extension is not None else extend(v, band, grid_size, cfg)
    if v.is_zero and perturb == 1.0:
        pts = check_points(band, res.grid.size, n_check)
        zeros = np.zeros(pts.size)
        return ConstancyReport(0.0, 0.0, 0.0, pts, zeros, zeros)
    full = res.completed(v, scale=perturb)
    pts = check_points(band, res.grid.size, n_check)
    vals = np.empty(pts.size)
    errs = np.empty(pts.size)
    for i, x in enumerate(pts):
        vals[i], errs[i] = hilbert_full_with_error(full, x, cfg)
    return ConstancyReport(
        alpha=res.alpha,
        alpha_measured=float(vals.mean()),
        max_deviation=float(np.max(np.abs(vals - res.alpha))),
        check_points=pts,
        hilbert_values=vals,
        hilbert_errors=errs,
        interpolation_resolved=res.edges_resolved,
    )

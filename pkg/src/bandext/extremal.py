"""Near-extremal families for the loss bound on the band.

With the level normalised to ``-1``, the smallest possible sup of the loss on
the band is ``(b² - a²) / (2ab)``; densities concentrated near zero approach it
from above without reaching it, and the completed profile tends to the
envelope pointwise, so every ``L^p`` norm converges too.  For positive level
the loss on the band can be made arbitrarily small by moving the density out
to infinity.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .density import Density, constant
from .errors import DomainError
from .kernels import Band, envelope, lambda_bound
from .parametrization import ExtensionResult, alpha_functional, extend
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_smooth

LP_ORDERS = (1, 2, 4)


@dataclass(frozen=True)
class SweepRecord:
    epsilon: float
    alpha: float
    sup_norm: float
    gap: float
    lp_norms: dict = field(default_factory=dict)
    error: float = 0.0

    def to_row(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "sup_norm": self.sup_norm,
            "gap": self.gap,
            "l1": self.lp_norms.get(1),
            "l2": self.lp_norms.get(2),
            "l4": self.lp_norms.get(4),
            "err": self.error,
        }


@dataclass(frozen=True)
class DecayRecord:
    R: float
    alpha: float
    sup_norm: float
    error: float = 0.0

    def to_row(self) -> dict:
        return {"R": self.R, "alpha": self.alpha, "sup_norm": self.sup_norm, "err": self.error}


def _t_abs_sigma(band: Band):
    def f(t):
        t2 = t * t
        return t / np.sqrt(np.abs(band.b**2 - t2) * np.abs(t2 - band.a**2))

    return f


def near_extremal_density(epsilon: float, band: Band, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Density:
    """Constant bump on ``(eps/2, eps)`` scaled so that the level is exactly ``-1``."""
    if not 0 < epsilon < band.a / 2:
        raise DomainError(f"epsilon must lie in (0, a/2) = (0, {band.a / 2:g}), got {epsilon!r}")
    moment = integrate_smooth(_t_abs_sigma(band), epsilon / 2, epsilon, cfg).value
    return constant(epsilon / 2, epsilon, math.pi / (2.0 * moment))


def far_density(R: float, band: Band, cfg: QuadratureConfig = DEFAULT_CONFIG) -> Density:
    """Constant bump on ``(R, R+1)`` scaled to level ``+1``."""
    if not R > band.b:
        raise DomainError(f"radius must exceed b={band.b:g}, got {R!r}")
    moment = integrate_smooth(_t_abs_sigma(band), R, R + 1.0, cfg).value
    return constant(R, R + 1.0, math.pi / (2.0 * moment))


def envelope_lp_norm(band: Band, p: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``‖envelope‖_p`` on the band, by direct quadrature in ``x``."""
    if math.isinf(p):
        return lambda_bound(band)
    # sqrt-type zeros at both ends: let the mesh refine there instead of tightening globally
    loose = cfg.with_overrides(rel_tol=max(cfg.rel_tol, 1e-9))
    return float(integrate_smooth(lambda x: envelope(x, band) ** p, band.a, band.b, loose).value) ** (1.0 / p)


def _map(fn, items, threads: int | None):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def sweep(
    epsilons: Sequence[float],
    band: Band,
    grid_size: int = 512,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    threads: int | None = None,
) -> list[SweepRecord]:
    """Run the near-extremal family over ``epsilons``; records sorted by epsilon descending."""
    eps = sorted((float(e) for e in epsilons), reverse=True)
    if not eps:
        raise DomainError("empty epsilon schedule")
    for e in eps:
        if not 0 < e < band.a / 2:
            raise DomainError(f"epsilon {e:g} outside (0, a/2)")
    lam = lambda_bound(band)

    def one(e: float) -> SweepRecord:
        v = near_extremal_density(e, band, cfg)
        res: ExtensionResult = extend(v, band, grid_size, cfg)
        norms = {p: res.lp_norm(p, cfg) for p in LP_ORDERS}
        norms[math.inf] = res.sup_norm
        return SweepRecord(
            epsilon=e,
            alpha=res.alpha,
            sup_norm=res.sup_norm,
            gap=res.sup_norm - lam,
            lp_norms=norms,
            error=res.max_error,
        )

    return _map(one, eps, threads)


def gap_ratios(records: Sequence[SweepRecord]) -> list[float]:
    """``gap(eps_{k+1}) / gap(eps_k)`` along the schedule."""
    return [r1.gap / r0.gap for r0, r1 in zip(records, records[1:])]


def positive_alpha_decay(
    radii: Sequence[float],
    band: Band,
    grid_size: int = 256,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    threads: int | None = None,
) -> list[DecayRecord]:
    """Loss on the band for level ``+1`` bumps pushed out to ``(R, R+1)``, in input order."""
    radii = [float(r) for r in radii]
    if not radii:
        raise DomainError("empty radius schedule")

    def one(R: float) -> DecayRecord:
        v = far_density(R, band, cfg)
        res = extend(v, band, grid_size, cfg)
        return DecayRecord(R=R, alpha=alpha_functional(v, band, cfg), sup_norm=res.sup_norm, error=res.max_error)

    return _map(one, radii, threads)

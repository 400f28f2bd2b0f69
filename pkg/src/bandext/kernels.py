"""Closed-form kernels attached to a band ``[a, b]``.

The switching kernel ``sigma(z) = 1 / (sqrt(z**2 - b**2) * sqrt(z**2 - a**2))``
is only ever needed on the real axis.  Its boundary values are computed by
dispatching on the four real regions instead of composing complex square
roots, so the branch is fixed by construction:

=================  ===========================================
region             value
=================  ===========================================
``|x| < a``        ``-1 / sqrt((b² - x²)(a² - x²))``   (real, < 0)
``a < x < b``      ``-1j / sqrt((b² - x²)(x² - a²))``  (imag, < 0)
``-b < x < -a``    ``+1j / sqrt((b² - x²)(x² - a²))``  (imag, > 0)
``|x| > b``        ``+1 / sqrt((x² - b²)(x² - a²))``   (real, > 0)
=================  ===========================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularArgumentError


@dataclass(frozen=True)
class Band:
    """The interval ``[a, b]`` with ``0 < a < b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or not 0.0 < a < b:
            raise DomainError(f"band requires 0 < a < b, got a={self.a!r}, b={self.b!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def parse(cls, text: str) -> "Band":
        """Build a band from ``"a,b"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise DomainError(f"expected 'a,b', got {text!r}")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError:
            raise DomainError(f"band edges must be numbers, got {text!r}") from None
        return cls(a, b)

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def dilate(self, s: float) -> "Band":
        if not s > 0:
            raise DomainError(f"dilation factor must be positive, got {s!r}")
        return Band(s * self.a, s * self.b)

    def contains(self, x, closed: bool = False):
        x = np.asarray(x, dtype=float)
        if closed:
            return (x >= self.a) & (x <= self.b)
        return (x > self.a) & (x < self.b)


def _check_regular(x: np.ndarray, band: Band) -> None:
    ax = np.abs(x)
    if np.any((ax == band.a) | (ax == band.b)):
        raise SingularArgumentError(
            f"sigma is singular at ±{band.a:g} and ±{band.b:g}; use the weighted quadrature there"
        )


def abs_sigma(x, band: Band):
    """Modulus ``1 / sqrt(|x² - b²| |x² - a²|)``.

    Accepts scalars or arrays; raises ``SingularArgumentError`` at ``±a, ±b``.
    """
    xa = np.asarray(x, dtype=float)
    _check_regular(xa, band)
    x2 = xa * xa
    out = 1.0 / np.sqrt(np.abs(x2 - band.b**2) * np.abs(x2 - band.a**2))
    return float(out) if out.ndim == 0 else out


def sigma(x, band: Band):
    """Boundary value of sigma on the real axis, continued from above.

    Returns a Python ``complex`` for scalar input, a complex array otherwise.
    """
    xa = np.asarray(x, dtype=float)
    mod = np.asarray(abs_sigma(xa, band))
    ax = np.abs(xa)
    inner = ax < band.a
    on_band = (ax > band.a) & (ax < band.b)

    re = np.where(inner, -mod, np.where(on_band, 0.0, mod))
    im = np.where(on_band, np.where(xa > 0, -mod, mod), 0.0)
    out = re + 1j * im
    return complex(out) if out.ndim == 0 else out


def sigma_real(t, band: Band):
    """Real-valued sigma for arguments off the band on the positive axis.

    Negative on ``(0, a)``, positive on ``(b, inf)``.  This is the form the
    integral operators need; points inside ``(a, b)`` are rejected.
    """
    ta = np.asarray(t, dtype=float)
    if np.any((ta > band.a) & (ta < band.b)):
        raise DomainError("sigma_real is only defined off the open band")
    mod = np.asarray(abs_sigma(ta, band))
    out = np.where(np.abs(ta) < band.a, -mod, mod)
    return float(out) if out.ndim == 0 else out


def envelope(x, band: Band):
    """Minimal-loss profile ``sqrt((b² - x²)(x² - a²)) / x²`` on ``[a, b]``."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa < band.a) | (xa > band.b)) or np.any(np.isnan(xa)):
        raise DomainError(f"envelope is defined on [{band.a:g}, {band.b:g}] only")
    x2 = xa * xa
    # clip guards the last-ulp sign of the vanishing factors at the endpoints
    prod = np.clip(band.b**2 - x2, 0.0, None) * np.clip(x2 - band.a**2, 0.0, None)
    out = np.sqrt(prod) / x2
    return float(out) if out.ndim == 0 else out


def lambda_bound(band: Band) -> float:
    """Extremal value ``(b² - a²) / (2ab)``; dilation invariant."""
    return (band.b - band.a) * (band.b + band.a) / (2.0 * band.a * band.b)


def argmax_envelope(band: Band) -> float:
    """Unique maximiser ``ab * sqrt(2 / (a² + b²))`` of the envelope."""
    return band.a * band.b * math.sqrt(2.0 / (band.a**2 + band.b**2))

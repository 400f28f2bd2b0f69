"""Passive Hermitian functions with constant real part on a band.

Completes a nonnegative loss density given off a band ``[a, b]`` to the
unique density whose half-line Hilbert transform is constant on the band,
and reproduces the extremal loss bound ``(b² - a²) / (2ab)``.
"""

from .density import (
    ConstantSegment,
    Density,
    FeasibilityReport,
    GridSegment,
    PowerSegment,
    Verdict,
    check_feasibility,
    constant,
    power,
    sampled,
)
from .errors import (
    BandextError,
    DecayViolationError,
    DomainError,
    InfeasibleDensityError,
    NonConvergenceError,
    ParseError,
    SingularArgumentError,
    SupportOverlapError,
)
from .extremal import near_extremal_density, positive_alpha_decay, sweep
from .kernels import Band, abs_sigma, argmax_envelope, envelope, lambda_bound, sigma
from .parametrization import (
    ExtensionResult,
    alpha_functional,
    extend,
    extension_at,
    hilbert_full,
    verify_constancy,
)
from .quadrature import (
    QuadratureConfig,
    QuadResult,
    integrate_pv,
    integrate_smooth,
    integrate_sqrt_weight,
    integrate_tail,
)

__version__ = "0.1.0"

__all__ = [
    "Band",
    "BandextError",
    "ConstantSegment",
    "DecayViolationError",
    "Density",
    "DomainError",
    "ExtensionResult",
    "FeasibilityReport",
    "GridSegment",
    "InfeasibleDensityError",
    "NonConvergenceError",
    "ParseError",
    "PowerSegment",
    "QuadResult",
    "QuadratureConfig",
    "SingularArgumentError",
    "SupportOverlapError",
    "Verdict",
    "abs_sigma",
    "alpha_functional",
    "argmax_envelope",
    "check_feasibility",
    "constant",
    "envelope",
    "extend",
    "extension_at",
    "hilbert_full",
    "integrate_pv",
    "integrate_smooth",
    "integrate_sqrt_weight",
    "integrate_tail",
    "lambda_bound",
    "near_extremal_density",
    "positive_alpha_decay",
    "power",
    "sampled",
    "sigma",
    "sweep",
    "verify_constancy",
]

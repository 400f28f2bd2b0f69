"""Exception hierarchy shared by the numerical modules and the CLI."""


class BandextError(Exception):
    """Base class for all errors raised by bandext."""


class SingularArgumentError(BandextError, ValueError):
    """A kernel was evaluated exactly at one of its branch points."""


class DomainError(BandextError, ValueError):
    """An argument lies outside the domain of the function."""


class NonConvergenceError(BandextError, ArithmeticError):
    """Adaptive quadrature exhausted its budget above tolerance.

    Attributes:
        value: best estimate reached before giving up.
        error: the error estimate attached to ``value``.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error


class DecayViolationError(BandextError, ArithmeticError):
    """A semi-infinite integrand does not decay fast enough."""


class SupportOverlapError(BandextError, ValueError):
    """A density meant to live off the band has support inside it."""


class InfeasibleDensityError(BandextError, ValueError):
    """The density violates the endpoint integrability condition."""


class ParseError(BandextError, ValueError):
    """An input document could not be read or does not match its schema."""

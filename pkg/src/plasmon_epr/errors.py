"""Exception hierarchy shared by every module of the package."""


class PlasmonEprError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(PlasmonEprError, ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class OutOfBandError(InvalidParameterError):
    """The plasmon frequency does not lie strictly inside the photon band.

    The continuum decay rate is undefined in that case.
    """

    def __init__(self, eps0, omega_bottom, omega_top):
        self.eps0 = eps0
        self.omega_bottom = omega_bottom
        self.omega_top = omega_top
        super().__init__(
            f"plasmon frequency eps0={eps0!r} is not strictly inside the photon band "
            f"({omega_bottom!r}, {omega_top!r}); the continuum decay rate does not apply"
        )


class NumericDomainError(PlasmonEprError, ArithmeticError):
    """Non-finite values appeared in a state or in a computed quantity."""


class IntegrationError(PlasmonEprError, RuntimeError):
    """The ODE integrator could not advance (step-size underflow, time budget)."""

    def __init__(self, message, last_good_time, partial=None):
        self.last_good_time = last_good_time
        self.partial = partial
        super().__init__(f"{message} (last good time t={last_good_time!r})")


class QuadratureError(PlasmonEprError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class FaintDriveError(InvalidParameterError):
    """The drive is too weak for the asymptotic maximum-squeezing formula."""


class TruncationError(PlasmonEprError, ValueError):
    """The Fock-space cutoff discards more norm than allowed."""


class ConfigError(PlasmonEprError, ValueError):
    """A scenario configuration could not be parsed or validated."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class GridMismatchError(InvalidParameterError):
    """Two sampled series do not share a time grid."""


class ScenarioError(PlasmonEprError):
    """A scenario run failed; ``cause`` holds the underlying error."""

    def __init__(self, scenario, cause):
        self.scenario = scenario
        self.cause = cause
        super().__init__(f"scenario {scenario!r}: {type(cause).__name__}: {cause}")

"""Exception and warning types shared across the package."""


class FoxWrightError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FoxWrightError, ValueError):
    """An argument lies outside the domain of an operation."""


class InputError(FoxWrightError, ValueError):
    """Malformed user input (parameter JSON, CLI options, ...)."""


class HypothesisError(FoxWrightError):
    """A required hypothesis (H1, H2, balanced weights) does not hold."""


class NumericalError(FoxWrightError, ArithmeticError):
    """Base class for numerical failures."""


class DivergenceError(NumericalError):
    """The defining series diverges at the requested argument."""


class NoConvergenceError(NumericalError):
    """An iterative procedure hit its work limit before converging."""


class PoleError(NumericalError):
    """Evaluation at or left of a pole of the Mellin integrand."""


class ZeroOnBoundaryError(NumericalError):
    """The function vanishes (numerically) on the counting contour."""


class AccuracyWarning(UserWarning):
    """A numerical result is returned but its error estimate is large."""

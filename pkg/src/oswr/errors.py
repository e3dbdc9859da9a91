"""Exception hierarchy shared across the package.

Validation failures (bad parameters, misaligned grids, malformed config)
raise :class:`ValidationError`; breakdowns of the numerics at run time
(blow-up, singular systems, transmission-operator resonances) raise
subclasses of :class:`NumericalError`.  The CLI maps the former to exit
code 1 and the latter to exit code 2.
"""


class OswrError(Exception):
    """Base class for all package errors."""


class ValidationError(OswrError, ValueError):
    """Invalid construction input: violated invariant or malformed config."""


class NumericalError(OswrError, RuntimeError):
    """A numerical computation failed irrecoverably."""


class StabilityError(NumericalError):
    """A time-stepping solve produced non-finite values."""


class SingularSystemError(NumericalError):
    """A tridiagonal solve hit a zero or tiny pivot."""


class ResonanceError(NumericalError):
    """The transmission-operator denominator underflowed at some frequency."""


class ClosureError(NumericalError):
    """A Robin boundary closure has a degenerate coefficient."""

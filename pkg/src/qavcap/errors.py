"""Exception hierarchy shared by every module."""


class QavcapError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class DimensionError(QavcapError, ValueError):
    """Operand dimensions do not fit together.

    ``axis`` names the offending subsystem or argument when known.
    """

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis


class InvariantError(QavcapError, ValueError):
    """A type invariant (CPTP, PSD, normalization, ...) is violated.

    ``invariant`` names the violated property and ``magnitude`` the size of
    the violation.
    """

    def __init__(self, message, invariant=None, magnitude=None):
        super().__init__(message)
        self.invariant = invariant
        self.magnitude = magnitude


class BudgetError(QavcapError):
    """A dense construction would exceed the configured memory budget."""


class SolverError(QavcapError):
    """A numerical subroutine failed in a way that prevents a verdict."""


class ParseError(QavcapError):
    """Malformed input file; the message carries the file location."""

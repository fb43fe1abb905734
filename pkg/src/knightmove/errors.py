"""Exception hierarchy shared by the package and the command line front end."""


class KnightMoveError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class PDParseError(KnightMoveError, ValueError):
    """Malformed planar diagram text or inconsistent crossing data."""

    exit_code = 2


class ValidationError(KnightMoveError, ValueError):
    """Input is well formed but violates a precondition (e.g. a link where a knot is needed)."""

    exit_code = 3


class NotAKnotError(ValidationError):
    pass


class BudgetExceeded(KnightMoveError, RuntimeError):
    """A computation was refused or aborted because it exceeds its configured budget."""

    exit_code = 4


class InvariantViolation(KnightMoveError, AssertionError):
    """An internal consistency check failed. Always a bug, never a property of the input."""

    exit_code = 5

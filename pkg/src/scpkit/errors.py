"""Exception hierarchy shared by the solvers and the command line."""


class ScpError(Exception):
    """Base class for every error raised by scpkit."""


class RangeError(ScpError):
    """A right-hand side does not lie in the column space of the matrix."""


class NoCompletion(ScpError):
    """The data admit no subnormal completion (a definitive negative)."""


class PositivityError(ScpError):
    """A moment that must be strictly positive vanished."""


class OrderError(ScpError):
    """Weights were not strictly increasing where that is required."""


class UnsupportedDegree(ScpError):
    """The requested completion degree is outside what is implemented."""


class NotSingular(ScpError):
    """A singular-case solver was handed an invertible moment matrix."""


class ConsistencyError(ScpError):
    """An internal invariant failed; indicates a bug or corrupted input."""


class ParseError(ScpError):
    """Instance text could not be parsed."""


class ValidationError(ScpError):
    """Instance text parsed but violates the instance schema."""

"""
Exception hierarchy. Every error carries the CLI exit code it maps to.
"""

from typing import Optional


class RotationAlgebraError(Exception):
    """Base class for all domain errors."""
    exit_code = 2


class ConfigError(RotationAlgebraError):
    """Invalid run configuration."""


class PreconditionError(RotationAlgebraError):
    """An operation was called outside its domain."""


class NotBoundedAway(RotationAlgebraError):
    """A function is not certifiably bounded away from zero."""


class ToleranceNotMet(RotationAlgebraError):
    """An a posteriori residual check failed."""


class MismatchedParameters(RotationAlgebraError):
    """Elements with different theta or weight were combined."""


class TooSmallL(RotationAlgebraError):
    """Truncation size smaller than the support width."""


class NotSelfAdjoint(RotationAlgebraError):
    """Self-adjoint routine called on a non-self-adjoint element."""


class NotUnimodular(RotationAlgebraError):
    """Conjugating function is not unimodular on the grid."""


class NotCovered(RotationAlgebraError):
    """Translate search hit its limit before certifying positivity."""


class OutOfRange(RotationAlgebraError):
    """Parameter outside the admissible range."""


class NoPlanFound(RotationAlgebraError):
    """No averaging family within the configured ceiling."""
    exit_code = 3


class ParseError(RotationAlgebraError):
    """Malformed input file."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)

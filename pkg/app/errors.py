"""Exception hierarchy — every failure the toolkit reports maps to one CLI exit code."""

from __future__ import annotations


class MagnonError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1


# ── Input / validation (exit 3) ──


class ValidationError(MagnonError, ValueError):
    """An input violates a documented invariant."""

    exit_code = 3


class ParseError(ValidationError):
    """A configuration document is not well-formed JSON."""

    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class InvalidArgument(ValidationError):
    pass


class NonPositiveFrequency(ValidationError):
    pass


class NonPositiveField(ValidationError):
    pass


class NegativeArgument(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class NonPhysicalGap(ValidationError):
    pass


class TooFewModes(ValidationError):
    pass


# ── Numerical failures (exit 4) ──


class NumericalError(MagnonError, ArithmeticError):
    """A computation left the model's domain or failed to converge."""

    exit_code = 4


class SingularPermeability(NumericalError):
    pass


class NegativeRadicand(NumericalError):
    pass


class NoSolutionInBand(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class DegenerateLoad(NumericalError):
    pass


class EmptyModeSet(NumericalError):
    pass


class NoPassband(NumericalError):
    pass


# ── Files (exit 5) ──


class IoError(MagnonError, OSError):
    """Reading or writing a result file failed."""

    exit_code = 5

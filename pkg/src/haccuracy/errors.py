"""Exception hierarchy.

Two families matter to callers: :class:`DataError` (the inputs are malformed
or do not support the requested metric) and :class:`ParameterError` (the
metric parameters are out of their admissible range). The command-line front
end maps them to distinct exit codes.
"""

from __future__ import annotations

from dataclasses import dataclass


class HaccuracyError(Exception):
    """Base class for every error raised by this package."""


class DataError(HaccuracyError, ValueError):
    pass


class ParameterError(HaccuracyError, ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    row: int | None = None

    def __str__(self) -> str:
        where = f"row {self.row}: " if self.row is not None else ""
        return f"{self.code}: {where}{self.message}"


class ValidationError(DataError):
    """Raised with every invariant violation found, not just the first."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


class ParseError(DataError):
    def __init__(self, message: str, row: int | None = None, path: str | None = None):
        self.row = row
        self.path = path
        prefix = f"{path}:" if path else ""
        prefix += f"{row}: " if row is not None else (" " if path else "")
        super().__init__(prefix + message)


class OutOfScaleOrdinal(ParseError):
    pass


class UnknownInstance(ParseError):
    pass


class DuplicateAnnotation(ParseError):
    pass


class EmptyClass(DataError):
    pass


class ZeroComplexityClass(DataError):
    pass


class MissingComplexity(DataError):
    pass


class NotBinary(DataError):
    pass


class PrevalenceNotHalf(DataError):
    pass


class NoCorrectAnnotations(DataError):
    pass


class DegenerateRaters(DataError):
    pass


class NegativeCell(DataError):
    pass


class TauBelowChance(ParameterError):
    pass


class TauOutOfRange(ParameterError):
    pass


class DegenerateAtOne(TauOutOfRange):
    pass


class InvalidPriorities(ParameterError):
    pass


class InvalidComplexity(ParameterError):
    pass

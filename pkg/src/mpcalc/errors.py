"""Error hierarchy.  Everything raised on bad input derives from CalcError
so the command line can map it to a uniform exit code."""

from __future__ import annotations


class CalcError(Exception):
    pass


class ParseError(CalcError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} at {line}:{column}"
        super().__init__(message)
        self.line = line
        self.column = column


class RateValueError(ParseError):
    """Non-positive or malformed rate literal."""


class ReservedNameError(CalcError):
    pass


class NotWellFormed(CalcError):
    pass


class StateBoundExceeded(CalcError):
    pass


class NotPerformanceClosed(CalcError):
    pass


class DependentComputations(CalcError):
    """prob_set asked to sum computations that are not pairwise independent."""


class LawError(CalcError):
    """Rewrite step does not apply: bad position, shape, or side condition."""

"""
Errors and diagnostics
======================

Every failure raised by the analysis derives from ``LctrsError``. Input
problems that should be reported together (parse errors, validation
findings) are collected as ``Diagnostic`` values instead.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence


@dataclass(frozen=True)
class SourceSpan:
    """Location of a diagnostic inside an input file (1-based line/column)."""
    start_line: int
    start_column: int
    end_line: int
    end_column: int
    start_offset: int
    end_offset: int

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_column}"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: Optional[SourceSpan] = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity.value}[{self.code}]: {self.message}"


class LctrsError(Exception):
    """Base class for every analysis error."""


class InvalidPosition(LctrsError):
    pass


class SortMismatch(LctrsError):
    pass


class NotConstructorTerm(LctrsError):
    pass


class NonLinearTerm(LctrsError):
    pass


class InfiniteComplement(LctrsError):
    """A non-variable term of a sort with infinitely many values has no finite complement."""


class NotAPattern(LctrsError):
    pass


class DivisorNotLinear(LctrsError):
    pass


class DividendNotValueFree(LctrsError):
    pass


class InconclusiveSatisfiability(LctrsError):
    def __init__(self, reason: str):
        super().__init__(f"satisfiability could not be decided: {reason}")
        self.reason = reason


class StepLimitExceeded(LctrsError):
    pass


class ConfigurationError(LctrsError):
    pass


class ValidationFailed(LctrsError):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics: List[Diagnostic] = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        super().__init__(f"{len(errors)} validation error(s): " + "; ".join(d.message for d in errors))


class ParseError(LctrsError):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics: List[Diagnostic] = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class EvaluationError(LctrsError):
    pass


class NonGroundTerm(EvaluationError):
    pass


class DivisionByZero(EvaluationError):
    pass


class NegativeExponent(EvaluationError):
    pass


class SolverError(LctrsError):
    pass


class SolverUnavailable(SolverError):
    pass


class SolverProtocolError(SolverError):
    pass


class UnsupportedSymbol(SolverError):
    pass

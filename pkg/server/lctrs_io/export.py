"""
JSON result export.

Schema::

    {"verdict": "quasi-reducible" | "not-quasi-reducible" | "unknown"    # check
                | "exact" | "inconclusive",                           # complement, diff
     "reason": "...",                                      # unknown or inconclusive only
     "witnesses": [{"term": "...", "constraint": "...", "status": "exact"}],
     "diagnostics": [{"severity": "...", "code": "...", "message": "...", "line": 3, "column": 1}],
     "oracle": {"ok": true, "missing": [...], "unexpected": [...]}}
"""

from typing import List, Optional, Sequence, Union

from pydantic import BaseModel, Field

from server.lctrs.constrained import ConstrainedTerm, canonicalize
from server.lctrs.difference import DiffOutcome
from server.lctrs.errors import Diagnostic
from server.lctrs.quasi_reducibility import QrKind, QrVerdict
from server.lctrs_io.printer import print_constraint, print_term


class WitnessModel(BaseModel):
    term: str
    constraint: str
    status: str = "exact"


class DiagnosticModel(BaseModel):
    severity: str
    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None


class OracleModel(BaseModel):
    ok: bool
    missing: List[str] = Field(default_factory=list)
    unexpected: List[str] = Field(default_factory=list)


class VerdictReport(BaseModel):
    verdict: str
    reason: Optional[str] = None
    witnesses: Optional[List[WitnessModel]] = None
    diagnostics: Optional[List[DiagnosticModel]] = None
    oracle: Optional[OracleModel] = None


def witness_model(ct: ConstrainedTerm, status: str = "exact") -> WitnessModel:
    ct = canonicalize(ct)
    return WitnessModel(term=print_term(ct.term), constraint=print_constraint(ct.constraint), status=status)


def diagnostic_model(diagnostic: Diagnostic) -> DiagnosticModel:
    span = diagnostic.span
    return DiagnosticModel(
        severity=diagnostic.severity.value,
        code=diagnostic.code,
        message=diagnostic.message,
        line=span.start_line if span else None,
        column=span.start_column if span else None,
    )


def _diagnostics(items: Sequence[Diagnostic]) -> Optional[List[DiagnosticModel]]:
    return [diagnostic_model(d) for d in items] or None


def verdict_report(verdict: QrVerdict, oracle: Optional[OracleModel] = None) -> VerdictReport:
    status = "inconclusive" if verdict.kind is QrKind.UNKNOWN else "exact"
    witnesses = [witness_model(w, status) for w in verdict.witnesses]
    if verdict.kind is QrKind.UNKNOWN and not witnesses:
        witnesses = None
    return VerdictReport(
        verdict=verdict.kind.value,
        reason=verdict.reason or None,
        witnesses=witnesses,
        diagnostics=_diagnostics(verdict.diagnostics),
        oracle=oracle,
    )


def diff_report(outcome: DiffOutcome, oracle: Optional[OracleModel] = None) -> VerdictReport:
    """Pieces of a complement or difference, reported as witnesses."""
    status = outcome.status.value
    return VerdictReport(
        verdict=status,
        reason="; ".join(outcome.reasons) or None,
        witnesses=[witness_model(ct, status) for ct in outcome.result],
        oracle=oracle,
    )


def export_json(result: Union[QrVerdict, DiffOutcome], oracle: Optional[OracleModel] = None) -> str:
    if isinstance(result, QrVerdict):
        report = verdict_report(result, oracle)
    else:
        report = diff_report(result, oracle)
    return report.model_dump_json(exclude_none=True)


def export_diagnostics(diagnostics: Sequence[Diagnostic]) -> str:
    """Report for input that could not be loaded."""
    report = VerdictReport(verdict="input-error", diagnostics=_diagnostics(diagnostics))
    return report.model_dump_json(exclude_none=True)

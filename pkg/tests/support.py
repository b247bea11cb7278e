"""Signatures and term builders shared by the test modules."""

import shutil
from pathlib import Path
from typing import Iterable, List, Sequence

import pytest

from server.lctrs.config import SolverConfig
from server.lctrs.constrained import ConstrainedTerm
from server.lctrs.context import AnalysisContext
from server.lctrs.terms import (
    INT, TRUE, App, FunctionSymbol, Signature, Sort, SymbolKind, Term, Var, int_value, is_variant,
)
from server.solver.backend import ConstraintSolver

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

requires_z3 = pytest.mark.skipif(shutil.which("z3") is None, reason="no z3 binary on PATH")

LIST = Sort("list")
NIL = FunctionSymbol("nil", (), LIST, SymbolKind.CONSTRUCTOR)
CONS = FunctionSymbol("cons", (INT, LIST), LIST, SymbolKind.CONSTRUCTOR)
F = FunctionSymbol("f", (LIST, INT), INT, SymbolKind.DEFINED)

SIG1 = Signature.build([LIST], [NIL, CONS, F])
SIG1_PRIME = Signature.build([LIST], [NIL, CONS, F], int_values=(0, 1))


def ivar(name: str) -> Var:
    return Var(name, INT)


def lvar(name: str) -> Var:
    return Var(name, LIST)


def num(n: int) -> App:
    return int_value(n)


def nil() -> App:
    return App(NIL)


def cons(head: Term, tail: Term) -> App:
    return App(CONS, (head, tail))


def f(xs: Term, y: Term) -> App:
    return App(F, (xs, y))


def pattern(term: Term, constraint: Term = TRUE) -> ConstrainedTerm:
    return ConstrainedTerm(term, constraint)


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def same_up_to_renaming(actual: Iterable[Term], expected: Sequence[Term]) -> bool:
    """Multiset equality where each term may be renamed independently."""
    remaining: List[Term] = list(expected)
    for t in actual:
        match = next((i for i, e in enumerate(remaining) if is_variant(t, e)), None)
        if match is None:
            return False
        del remaining[match]
    return not remaining


def builtin_context(signature: Signature) -> AnalysisContext:
    """A context that never consults an external solver, whatever is installed."""
    return AnalysisContext(signature, solver=ConstraintSolver(SolverConfig(fallback=False)))

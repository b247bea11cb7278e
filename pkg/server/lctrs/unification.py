"""
Syntactic Unification
=====================

Transformation-based unification with the rules Delete, Decompose,
EliminateL and EliminateR (there is no Orient rule, so equations keep the
side they started on). The extended solved form admits both ``x =? t`` and
``t =? y``; both orientations become bindings of the mgu.

Rule selection is deterministic: the first applicable rule in the order
above, scanning equations from left to right. EliminateR only fires on
equations whose left side is not a variable.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Set

from server.lctrs.errors import SortMismatch
from server.lctrs.terms import App, Substitution, Term, Var, var_occurrences

logger = logging.getLogger(__name__)

DELETE = "Delete"
DECOMPOSE = "Decompose"
ELIMINATE_L = "EliminateL"
ELIMINATE_R = "EliminateR"


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.lhs.sort != self.rhs.sort:
            raise SortMismatch(f"equation {self.lhs} =? {self.rhs} mixes sorts {self.lhs.sort} and {self.rhs.sort}")

    def __str__(self) -> str:
        return f"{self.lhs} =? {self.rhs}"


@dataclass(frozen=True)
class UnificationProblem:
    equations: tuple = ()

    def __post_init__(self):
        if not isinstance(self.equations, tuple):
            object.__setattr__(self, "equations", tuple(self.equations))

    @classmethod
    def of(cls, s: Term, t: Term) -> "UnificationProblem":
        return cls((Equation(s, t),))

    def __len__(self) -> int:
        return len(self.equations)

    def __str__(self) -> str:
        return "{" + ", ".join(str(e) for e in self.equations) + "}"


def _vars_except(equations: List[Equation], skip: int) -> Set[Var]:
    found: Set[Var] = set()
    for index, eq in enumerate(equations):
        if index != skip:
            found.update(var_occurrences(eq.lhs))
            found.update(var_occurrences(eq.rhs))
    return found


def _substitute(equations: List[Equation], skip: int, sigma: Substitution) -> List[Equation]:
    return [
        eq if index == skip else Equation(sigma.apply(eq.lhs), sigma.apply(eq.rhs))
        for index, eq in enumerate(equations)
    ]


def _step(equations: List[Equation], trace: Optional[Counter]) -> Optional[List[Equation]]:
    """Apply the first applicable rule; ``None`` when no rule applies."""
    for index, eq in enumerate(equations):
        if eq.lhs == eq.rhs:
            _count(trace, DELETE)
            return equations[:index] + equations[index + 1:]

    for index, eq in enumerate(equations):
        if isinstance(eq.lhs, App) and isinstance(eq.rhs, App) and eq.lhs.symbol == eq.rhs.symbol:
            _count(trace, DECOMPOSE)
            parts = [Equation(a, b) for a, b in zip(eq.lhs.args, eq.rhs.args)]
            return equations[:index] + parts + equations[index + 1:]

    for index, eq in enumerate(equations):
        if isinstance(eq.lhs, Var):
            x = eq.lhs
            if x in _vars_except(equations, index) and x not in var_occurrences(eq.rhs):
                _count(trace, ELIMINATE_L)
                return _substitute(equations, index, Substitution({x: eq.rhs}))

    # x =? y is left-oriented; eliminating y as well would undo EliminateL
    for index, eq in enumerate(equations):
        if isinstance(eq.rhs, Var) and not isinstance(eq.lhs, Var):
            x = eq.rhs
            if x in _vars_except(equations, index) and x not in var_occurrences(eq.lhs):
                _count(trace, ELIMINATE_R)
                return _substitute(equations, index, Substitution({x: eq.lhs}))

    return None


def _count(trace: Optional[Counter], rule: str) -> None:
    if trace is not None:
        trace[rule] += 1


def _solved_binding(equations: List[Equation], index: int):
    """The (variable, image) pair of a solved equation, or ``None``."""
    eq = equations[index]
    others = _vars_except(equations, index)
    if isinstance(eq.lhs, Var) and eq.lhs not in others and eq.lhs not in var_occurrences(eq.rhs):
        return eq.lhs, eq.rhs
    if isinstance(eq.rhs, Var) and eq.rhs not in others and eq.rhs not in var_occurrences(eq.lhs):
        return eq.rhs, eq.lhs
    return None


def solved_form(problem: UnificationProblem, trace: Optional[Counter] = None) -> Optional[UnificationProblem]:
    """Normalize exhaustively; the result only if it is in (extended) solved form."""
    equations = list(problem.equations)
    while True:
        nxt = _step(equations, trace)
        if nxt is None:
            break
        equations = nxt
    for index in range(len(equations)):
        if _solved_binding(equations, index) is None:
            logger.debug("unification stuck at %s", equations[index])
            return None
    return UnificationProblem(tuple(equations))


def mgu_of(problem: UnificationProblem) -> Substitution:
    """Read the mgu off a solved problem; for x =? y the left variable is bound."""
    equations = list(problem.equations)
    bindings = []
    for index in range(len(equations)):
        binding = _solved_binding(equations, index)
        if binding is None:
            raise ValueError(f"{problem} is not in solved form")
        bindings.append(binding)
    return Substitution(bindings)


def unify(s: Term, t: Term, trace: Optional[Counter] = None) -> Optional[Substitution]:
    """An idempotent mgu of {s =? t}, or ``None`` on clash or occurs-check failure."""
    if s.sort != t.sort:
        raise SortMismatch(f"cannot unify {s}:{s.sort} with {t}:{t.sort}")
    solved = solved_form(UnificationProblem.of(s, t), trace)
    if solved is None:
        return None
    return mgu_of(solved)

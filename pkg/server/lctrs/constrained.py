"""
Constrained Terms
=================

A constrained term ``t [phi]`` stands for the ground instances of ``t``
under substitutions that map the variables of ``phi`` to values making
``phi`` true. This module provides the value-free transformation,
renaming apart, unifiability of constrained terms and the equivalence
used to remove duplicates from result sets.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from server.lctrs.context import AnalysisContext
from server.lctrs.errors import InconclusiveSatisfiability, NotAPattern, SortMismatch
from server.lctrs.terms import (
    BOOL, TRUE, App, FreshVariables, Substitution, Term, Var,
    base_name, conjunction, is_linear, is_pattern, is_theory_term, is_value, is_value_free,
    mk_and, mk_eq, more_general, replace_at, subterm_at, value_positions, variables,
)
from server.lctrs.unification import unify
from server.solver.results import EquivVerdict, SatResult
from server.solver.simplify import conjuncts, simplify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstrainedTerm:
    term: Term
    constraint: Term = TRUE

    def __post_init__(self):
        if self.constraint.sort != BOOL:
            raise SortMismatch(f"constraint {self.constraint} has sort {self.constraint.sort}, expected bool")
        if not is_theory_term(self.constraint):
            raise SortMismatch(f"constraint {self.constraint} mentions non-theory symbols")

    @property
    def variables(self) -> List[Var]:
        return variables(self.term, self.constraint)

    @property
    def is_pattern(self) -> bool:
        return is_pattern(self.term)

    @property
    def is_linear(self) -> bool:
        return is_linear(self.term)

    @property
    def is_value_free(self) -> bool:
        return is_value_free(self.term)

    def apply(self, sigma: Substitution) -> "ConstrainedTerm":
        return ConstrainedTerm(sigma.apply(self.term), sigma.apply(self.constraint))

    def __iter__(self):
        yield self.term
        yield self.constraint

    def __str__(self) -> str:
        return f"{self.term} [{self.constraint}]"


ConstrainedPattern = ConstrainedTerm


def constrained_pattern(term: Term, constraint: Term = TRUE) -> ConstrainedTerm:
    if not is_pattern(term):
        raise NotAPattern(f"{term} is not a pattern")
    return ConstrainedTerm(term, constraint)


# ============================================================================
# TRANSFORMATIONS
# ============================================================================

def value_free(ct: ConstrainedTerm, fresh: FreshVariables) -> ConstrainedTerm:
    """Replace each value occurrence by a fresh variable equated to it in the constraint."""
    found = value_positions(ct.term)
    if not found:
        return ct
    fresh.reserve(ct.term, ct.constraint)
    term = ct.term
    equalities = []
    for position in found:
        value = subterm_at(term, position)
        y = fresh.fresh(value.sort, "y")
        term = replace_at(term, position, y)
        equalities.append(mk_eq(y, value))
    return ConstrainedTerm(term, conjunction([ct.constraint] + equalities))


def renaming_apart(ct: ConstrainedTerm, avoid: Iterable[Var], fresh: FreshVariables) -> Substitution:
    taken = set(avoid)
    fresh.reserve(ct.term, ct.constraint)
    return Substitution({v: fresh.fresh(v.sort, base_name(v)) for v in ct.variables if v in taken})


def rename_apart(ct: ConstrainedTerm, avoid: Iterable[Var], fresh: FreshVariables) -> ConstrainedTerm:
    """A variant of ``ct`` sharing no variable with ``avoid``; other names are kept."""
    return ct.apply(renaming_apart(ct, avoid, fresh))


def canonical_renaming(names: Sequence[Var]) -> Substitution:
    """Strip freshness suffixes and disambiguate clashes with primes."""
    used = set()
    bindings: Dict[Var, Term] = {}
    for v in names:
        name = base_name(v)
        while name in used:
            name += "'"
        used.add(name)
        bindings[v] = Var(name, v.sort)
    return Substitution(bindings)


def canonicalize(ct: ConstrainedTerm) -> ConstrainedTerm:
    """Simplified constraint and readable variable names."""
    simplified = ConstrainedTerm(ct.term, simplify(ct.constraint))
    return simplified.apply(canonical_renaming(simplified.variables))


# ============================================================================
# UNIFIABILITY
# ============================================================================

@dataclass
class Overlap:
    """Common instance of two constrained terms with disjoint variables."""
    mgu: Substitution
    joint: Term
    verdict: SatResult


def find_overlap(ct1: ConstrainedTerm, ct2: ConstrainedTerm, ctx: AnalysisContext) -> Optional[Overlap]:
    """
    Unifier of the terms whose constraint variables stay values or variables,
    together with the satisfiability verdict of the merged constraint.
    ``None`` when there is no unifier or the merged constraint is unsatisfiable.
    """
    if ct1.term.sort != ct2.term.sort:
        return None
    theta = unify(ct1.term, ct2.term)
    if theta is None:
        return None
    for x in variables(ct1.constraint, ct2.constraint):
        image = theta.image(x)
        if not (isinstance(image, Var) or is_value(image)):
            logger.debug("constraint variable %s bound to %s; not unifiable", x, image)
            return None
    joint = mk_and(theta.apply(ct1.constraint), theta.apply(ct2.constraint))
    verdict = ctx.is_satisfiable(joint)
    if verdict.is_unsat:
        return None
    return Overlap(theta, joint, verdict)


def constrained_unifiable(ct1: ConstrainedTerm, ct2: ConstrainedTerm,
                          ctx: AnalysisContext) -> Optional[Tuple[Substitution, Term]]:
    overlap = find_overlap(ct1, ct2, ctx)
    if overlap is None:
        return None
    if overlap.verdict.is_unknown:
        raise InconclusiveSatisfiability(overlap.verdict.reason)
    return overlap.mgu, overlap.joint


# ============================================================================
# EQUIVALENCE UP TO RENAMING
# ============================================================================

class DotEqual(Enum):
    EQUAL = "equal"
    NOT_EQUAL = "not-equal"
    UNKNOWN = "unknown"


def _masked_key(t: Term, hidden: Sequence[Var]) -> str:
    if isinstance(t, Var):
        return "?" if t in hidden else t.name
    if not t.args:
        return t.symbol.name
    return f"{t.symbol.name}({','.join(_masked_key(a, hidden) for a in t.args)})"


def _ordered(phi: Term, hidden: Sequence[Var]) -> Term:
    parts = [p for p in conjuncts(simplify(phi)) if p != TRUE]
    return conjunction(sorted(parts, key=lambda p: _masked_key(p, hidden)))


def _bijection(sigma: Substitution, domain: Sequence[Var], codomain: Sequence[Var]) -> bool:
    images = [sigma.image(v) for v in domain]
    if any(v not in domain for v in sigma):
        return False
    return all(isinstance(x, Var) and x in codomain for x in images) and len(set(images)) == len(images)


def dot_equal(ct1: ConstrainedTerm, ct2: ConstrainedTerm, mode: str = "syntactic",
              ctx: Optional[AnalysisContext] = None) -> DotEqual:
    """
    Equal when a renaming maps ``ct2`` onto ``ct1``. Syntactic mode compares
    constraints up to conjunct order; semantic mode asks the solver whether
    the existentially closed constraints are equivalent.
    """
    if ct1.term.sort != ct2.term.sort:
        return DotEqual.NOT_EQUAL
    delta = more_general(ct2.term, ct1.term)
    term_vars2 = variables(ct2.term)
    if delta is None or not _bijection(delta, term_vars2, variables(ct1.term)):
        return DotEqual.NOT_EQUAL

    # constraint-only variables of ct2 first move away from the names of ct1
    extra2 = [v for v in variables(ct2.constraint) if v not in term_vars2]
    taken = set(ct1.variables)
    spare = FreshVariables()
    spare.reserve(ct1.term, ct1.constraint, ct2.term, ct2.constraint)
    moved = {v: spare.fresh(v.sort, base_name(v)) for v in extra2 if v in taken}
    renamed = Substitution({**{v: delta.image(v) for v in term_vars2}, **moved})
    phi = ct1.constraint
    psi = renamed.apply(ct2.constraint)
    extra1 = [v for v in variables(phi) if v not in variables(ct1.term)]
    extra2 = [renamed.image(v) for v in extra2]

    left, right = _ordered(phi, extra1), _ordered(psi, extra2)
    if left == right and not extra1 and not extra2:
        return DotEqual.EQUAL
    matcher = more_general(right, left)
    if matcher is not None and _bijection(matcher, extra2, extra1) and len(extra1) == len(extra2):
        return DotEqual.EQUAL

    if mode != "semantic" or ctx is None:
        return DotEqual.UNKNOWN
    verdict = ctx.solver.check_equiv(phi, psi, extra1, extra2)
    if verdict is EquivVerdict.EQUIV:
        return DotEqual.EQUAL
    if verdict is EquivVerdict.NOT_EQUIV:
        return DotEqual.NOT_EQUAL
    return DotEqual.UNKNOWN


def dotted_union(first: Iterable[ConstrainedTerm], second: Iterable[ConstrainedTerm],
                 mode: str = "syntactic", ctx: Optional[AnalysisContext] = None) -> List[ConstrainedTerm]:
    """Union keeping the first representative of each ``dot_equal`` class."""
    result: List[ConstrainedTerm] = []
    for ct in list(first) + list(second):
        if not any(dot_equal(ct, kept, mode, ctx) is DotEqual.EQUAL for kept in result):
            result.append(ct)
    return result

"""
Ground Instance Oracle
======================

Brute-force enumeration of ground constructor instances over a finite
fragment (an integer interval and a height bound). Every set equality the
difference and complement operations promise can be refuted on such a
fragment, so these functions back the property tests and the CLI's
``--oracle-check``.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set

from server.lctrs.config import OracleConfig
from server.lctrs.constrained import ConstrainedTerm
from server.lctrs.errors import ConfigurationError, EvaluationError, InconclusiveSatisfiability
from server.lctrs.quasi_reducibility import Lctrs, is_redex
from server.lctrs.terms import (
    BOOL, FALSE, INT, TRUE, App, Signature, Sort, Substitution, SymbolKind, Term, Var,
    height, int_value, is_value, iter_subterms, serialize, value_of, variables,
)
from server.solver.backend import ConstraintSolver
from server.solver.builtin import builtin_sat
from server.solver.evaluation import eval_ground

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteFragment:
    int_min: int = -2
    int_max: int = 2
    max_height: int = 4

    def __post_init__(self):
        if self.int_min > self.int_max:
            raise ConfigurationError(f"empty integer range {self.int_min}..{self.int_max}")
        if self.max_height < 1:
            raise ConfigurationError("max_height must be at least 1")

    @classmethod
    def from_config(cls, config: OracleConfig) -> "FiniteFragment":
        return cls(config.int_min, config.int_max, config.max_height)

    def ints(self, sig: Signature) -> List[int]:
        return [
            n for n in range(self.int_min, self.int_max + 1)
            if sig.int_values is None or n in sig.int_values
        ]


class GroundEnumerator:
    """Ground constructor terms by sort and height bound, memoized."""

    def __init__(self, sig: Signature, frag: FiniteFragment):
        self.sig = sig
        self.frag = frag
        self._cache: Dict[tuple, List[Term]] = {}

    def upto(self, sort: Sort, limit: int) -> List[Term]:
        if limit < 1:
            return []
        if sort == BOOL:
            return [FALSE, TRUE]
        if sort == INT:
            return [int_value(n) for n in self.frag.ints(self.sig)]
        key = (sort, limit)
        if key not in self._cache:
            terms: List[Term] = []
            for c in self.sig.constructors(sort):
                choices = [self.upto(s, limit - 1) for s in c.arg_sorts]
                terms.extend(App(c, args) for args in itertools.product(*choices))
            self._cache[key] = terms
        return self._cache[key]


def enumerate_ground(sort: Sort, frag: FiniteFragment, sig: Signature) -> List[Term]:
    return GroundEnumerator(sig, frag).upto(sort, frag.max_height)


def enumerate_ground_patterns(sig: Signature, frag: FiniteFragment,
                              enumerator: Optional[GroundEnumerator] = None) -> List[Term]:
    """Every ``f(c1, ..., cn)`` with ``f`` defined and each ``ci`` within the fragment."""
    enumerator = enumerator or GroundEnumerator(sig, frag)
    patterns: List[Term] = []
    for f in sig.defined_symbols():
        choices = [enumerator.upto(s, frag.max_height) for s in f.arg_sorts]
        patterns.extend(App(f, args) for args in itertools.product(*choices))
    return patterns


def _budgets(t: Term, limit: int) -> Dict[Var, int]:
    """Height allowed for each variable so that every constructor argument stays within ``limit``."""
    budgets: Dict[Var, int] = {}

    def walk(u: Term, depth: int) -> None:
        if isinstance(u, Var):
            budgets[u] = min(budgets.get(u, limit), limit - depth)
        elif u.symbol.kind is SymbolKind.DEFINED:
            for a in u.args:
                walk(a, 0)
        else:
            for a in u.args:
                walk(a, depth + 1)

    walk(t, 0)
    return budgets


def _values_in_range(t: Term, frag: FiniteFragment, sig: Signature) -> bool:
    allowed = set(frag.ints(sig))
    return all(
        value_of(u) in allowed
        for _, u in iter_subterms(t)
        if is_value(u) and u.sort == INT
    )


def _within(t: Term, frag: FiniteFragment) -> bool:
    """Every constructor argument of a defined root (or the term itself) respects the height bound."""
    if isinstance(t, App) and t.symbol.kind is SymbolKind.DEFINED:
        return all(height(a) <= frag.max_height for a in t.args)
    return height(t) <= frag.max_height


def _holds(phi: Term, extra: Sequence[Var], sig: Signature) -> bool:
    """Truth of ``phi`` with its remaining variables existentially closed over the full value families."""
    if not extra:
        try:
            return eval_ground(phi) is True
        except EvaluationError:
            return False
    families = [sig.values_of(v.sort) for v in extra]
    if any(family is None for family in families):
        result = builtin_sat(phi)
        if result.is_unknown:
            raise InconclusiveSatisfiability(result.reason)
        return result.is_sat
    for images in itertools.product(*families):
        try:
            if eval_ground(Substitution(dict(zip(extra, images))).apply(phi)) is True:
                return True
        except EvaluationError:
            continue
    return False


def ginst(ct: ConstrainedTerm, frag: FiniteFragment, sig: Signature,
          enumerator: Optional[GroundEnumerator] = None) -> Set[Term]:
    enumerator = enumerator or GroundEnumerator(sig, frag)
    if not _values_in_range(ct.term, frag, sig):
        return set()
    term_vars = variables(ct.term)
    budgets = _budgets(ct.term, frag.max_height)
    domains = [enumerator.upto(v.sort, budgets[v]) for v in term_vars]
    extra = [v for v in variables(ct.constraint) if v not in term_vars]
    instances: Set[Term] = set()
    for images in itertools.product(*domains):
        sigma = Substitution(dict(zip(term_vars, images)))
        instance = sigma.apply(ct.term)
        if _within(instance, frag) and _holds(sigma.apply(ct.constraint), extra, sig):
            instances.add(instance)
    return instances


def ginst_all(patterns: Iterable[ConstrainedTerm], frag: FiniteFragment, sig: Signature,
              enumerator: Optional[GroundEnumerator] = None) -> Set[Term]:
    enumerator = enumerator or GroundEnumerator(sig, frag)
    result: Set[Term] = set()
    for ct in patterns:
        result |= ginst(ct, frag, sig, enumerator)
    return result


# ============================================================================
# REPORTS
# ============================================================================

@dataclass
class OracleReport:
    missing: List[str] = field(default_factory=list)
    unexpected: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing and not self.unexpected

    @classmethod
    def compare(cls, expected: Set[Term], actual: Set[Term]) -> "OracleReport":
        expected_keys = {serialize(t) for t in expected}
        actual_keys = {serialize(t) for t in actual}
        return cls(sorted(expected_keys - actual_keys), sorted(actual_keys - expected_keys))


def compare_diff_semantics(P: Sequence[ConstrainedTerm], Q: Sequence[ConstrainedTerm],
                           D: Sequence[ConstrainedTerm], frag: FiniteFragment,
                           sig: Signature) -> OracleReport:
    enumerator = GroundEnumerator(sig, frag)
    expected = ginst_all(P, frag, sig, enumerator) - ginst_all(Q, frag, sig, enumerator)
    report = OracleReport.compare(expected, ginst_all(D, frag, sig, enumerator))
    logger.debug("diff oracle: %d expected, %d missing, %d unexpected",
                 len(expected), len(report.missing), len(report.unexpected))
    return report


def check_diff_semantics(P: Sequence[ConstrainedTerm], Q: Sequence[ConstrainedTerm],
                         D: Sequence[ConstrainedTerm], frag: FiniteFragment, sig: Signature) -> bool:
    return compare_diff_semantics(P, Q, D, frag, sig).ok


def check_witnesses(system: Lctrs, witnesses: Sequence[ConstrainedTerm], frag: FiniteFragment,
                    solver: Optional[ConstraintSolver] = None) -> OracleReport:
    """The irreducible ground patterns of the fragment must be exactly the instances of the witnesses."""
    sig = system.signature
    enumerator = GroundEnumerator(sig, frag)
    irreducible = {
        t for t in enumerate_ground_patterns(sig, frag, enumerator) if not is_redex(t, system, solver)
    }
    report = OracleReport.compare(irreducible, ginst_all(witnesses, frag, sig, enumerator))
    logger.info("oracle: %d irreducible ground pattern(s), %s", len(irreducible), "OK" if report.ok else "MISMATCH")
    return report


def check_quasi_reducible(system: Lctrs, frag: FiniteFragment,
                          solver: Optional[ConstraintSolver] = None) -> OracleReport:
    return check_witnesses(system, [], frag, solver)

"""
Difference of Patterns
======================

``s ⊖ t`` describes the ground instances of ``s`` that are not instances
of ``t``, as a finite list of (constrained) patterns. Three layers:

1. ``diff_unconstrained`` over plain linear patterns
2. ``diff`` over value-free constrained patterns
3. ``diff_sets`` over lists of value-free constrained linear patterns,
   repeatedly subtracting the first overlapping pair in both directions

Any Unknown from the solver keeps the untested piece in the result and
marks the outcome inconclusive.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from server.lctrs.complement import copattern
from server.lctrs.constrained import (
    ConstrainedTerm, Overlap, dotted_union, find_overlap, rename_apart, value_free,
)
from server.lctrs.context import AnalysisContext
from server.lctrs.errors import (
    DividendNotValueFree, DivisorNotLinear, NotAPattern, StepLimitExceeded,
)
from server.lctrs.terms import (
    Substitution, Term, is_linear, is_pattern, is_variant, is_value_free, mk_and, mk_not,
    strictly_more_general, variables,
)
from server.lctrs.unification import unify

logger = logging.getLogger(__name__)


class DiffStatus(Enum):
    EXACT = "exact"
    INCONCLUSIVE = "inconclusive"


@dataclass
class DiffOutcome:
    result: List[ConstrainedTerm]
    status: DiffStatus = DiffStatus.EXACT
    reasons: List[str] = field(default_factory=list)

    @property
    def is_exact(self) -> bool:
        return self.status is DiffStatus.EXACT

    def __iter__(self):
        return iter(self.result)

    def __len__(self) -> int:
        return len(self.result)

    @classmethod
    def of(cls, result: List[ConstrainedTerm], reasons: List[str]) -> "DiffOutcome":
        status = DiffStatus.INCONCLUSIVE if reasons else DiffStatus.EXACT
        return cls(result, status, list(dict.fromkeys(reasons)))


# ============================================================================
# UNCONSTRAINED PATTERNS
# ============================================================================

def diff_unconstrained(s: Term, t: Term, ctx: AnalysisContext) -> List[Term]:
    if not is_pattern(s):
        raise NotAPattern(f"{s} is not a pattern")
    if not is_pattern(t):
        raise NotAPattern(f"{t} is not a pattern")
    if not is_linear(t):
        raise DivisorNotLinear(f"{t} is not linear")
    ctx.reserve(s, t)
    divisor = rename_apart(ConstrainedTerm(t), variables(s), ctx.fresh).term
    sigma = unify(s, divisor) if s.sort == divisor.sort else None
    if sigma is None:
        return [s]
    return copattern(s, sigma, ctx.signature, ctx.fresh)


# ============================================================================
# CONSTRAINED PATTERNS
# ============================================================================

def _check_dividend(ct: ConstrainedTerm) -> None:
    if not ct.is_pattern:
        raise NotAPattern(f"{ct.term} is not a pattern")
    if not ct.is_value_free:
        raise DividendNotValueFree(f"{ct.term} contains values")


def _prepare_divisor(ct: ConstrainedTerm, ctx: AnalysisContext) -> ConstrainedTerm:
    if not ct.is_pattern:
        raise NotAPattern(f"{ct.term} is not a pattern")
    if not ct.is_linear:
        raise DivisorNotLinear(f"{ct.term} is not linear")
    return value_free(ct, ctx.fresh)


def _pieces(own: ConstrainedTerm, other: ConstrainedTerm, sigma: Substitution,
            ctx: AnalysisContext) -> Tuple[List[ConstrainedTerm], List[str]]:
    """``own`` minus ``other`` given their mgu: complement pieces then the guarded instance."""
    own_constraint = sigma.apply(own.constraint)
    pieces = [
        ConstrainedTerm(u, own_constraint)
        for u in copattern(own.term, sigma, ctx.signature, ctx.fresh)
    ]
    guarded = mk_and(own_constraint, mk_not(sigma.apply(other.constraint)))
    verdict = ctx.is_satisfiable(guarded)
    reasons = []
    if not verdict.is_unsat:
        pieces.append(ConstrainedTerm(sigma.apply(own.term), guarded))
        if verdict.is_unknown:
            reasons.append(verdict.reason)
    return pieces, reasons


def diff(dividend: ConstrainedTerm, divisor: ConstrainedTerm, ctx: AnalysisContext) -> DiffOutcome:
    _check_dividend(dividend)
    divisor = _prepare_divisor(divisor, ctx)
    ctx.reserve(dividend, divisor)
    divisor = rename_apart(divisor, dividend.variables, ctx.fresh)
    overlap = find_overlap(dividend, divisor, ctx)
    if overlap is None:
        return DiffOutcome([dividend])
    reasons = [overlap.verdict.reason] if overlap.verdict.is_unknown else []
    pieces, more = _pieces(dividend, divisor, overlap.mgu, ctx)
    logger.debug("%s minus %s: %d piece(s)", dividend, divisor, len(pieces))
    return DiffOutcome.of(pieces, reasons + more)


# ============================================================================
# SETS OF CONSTRAINED PATTERNS
# ============================================================================

@dataclass
class DiffStep:
    """One subtraction performed by ``diff_sets``."""
    dividend: ConstrainedTerm
    divisor: ConstrainedTerm
    dividend_pieces: List[ConstrainedTerm]
    divisor_pieces: List[ConstrainedTerm]
    weight_before: List[Tuple[Term, int]]
    weight_after: List[Tuple[Term, int]]
    dividend_weight: Tuple[Term, int]
    piece_weights: List[Tuple[Term, int]]
    isolated: bool


def _overlap_with(s_ct: ConstrainedTerm, t_ct: ConstrainedTerm,
                  ctx: AnalysisContext) -> Optional[Tuple[ConstrainedTerm, Overlap]]:
    renamed = rename_apart(t_ct, s_ct.variables, ctx.fresh)
    overlap = find_overlap(s_ct, renamed, ctx)
    if overlap is None:
        return None
    return renamed, overlap


def _first_effective(P: Sequence[ConstrainedTerm], Q: Sequence[ConstrainedTerm], ctx: AnalysisContext):
    for i, s_ct in enumerate(P):
        for j, t_ct in enumerate(Q):
            found = _overlap_with(s_ct, t_ct, ctx)
            if found is not None:
                return i, j, found[0], found[1]
    return None


def diff_weight(P: Sequence[ConstrainedTerm], Q: Sequence[ConstrainedTerm],
                ctx: AnalysisContext) -> List[Tuple[Term, int]]:
    """Each dividend term paired with the number of divisors that overlap it."""
    weight = []
    for s_ct in P:
        count = sum(1 for t_ct in Q if _overlap_with(s_ct, t_ct, ctx) is not None)
        weight.append((s_ct.term, count))
    return weight


def weight_greater(a: Tuple[Term, int], b: Tuple[Term, int]) -> bool:
    """Lexicographic: strictly more general term, or a variant with a larger count."""
    (s, n), (u, m) = a, b
    if strictly_more_general(s, u):
        return True
    return is_variant(s, u) and n > m


def _weight_equal(a: Tuple[Term, int], b: Tuple[Term, int]) -> bool:
    return a[1] == b[1] and is_variant(a[0], b[0])


def multiset_greater(M: Sequence[Tuple[Term, int]], N: Sequence[Tuple[Term, int]]) -> bool:
    """Multiset extension of ``weight_greater``."""
    left, right = list(M), list(N)
    for item in list(left):
        for index, other in enumerate(right):
            if _weight_equal(item, other):
                left.remove(item)
                del right[index]
                break
    if not left and not right:
        return False
    return all(any(weight_greater(x, y) for x in left) for y in right)


def _validate_members(members: Sequence[ConstrainedTerm]) -> None:
    for ct in members:
        _check_dividend(ct)
        if not ct.is_linear:
            raise DivisorNotLinear(f"{ct.term} is not linear")


def diff_sets(P: Sequence[ConstrainedTerm], Q: Sequence[ConstrainedTerm], ctx: AnalysisContext,
              trace: Optional[List[DiffStep]] = None) -> DiffOutcome:
    """
    Subtract every member of ``Q`` from ``P``. Members of ``P`` are expected
    to be pairwise non-overlapping; the result then is as well.
    """
    P, Q = list(P), list(Q)
    _validate_members(P)
    _validate_members(Q)
    ctx.reserve(*P, *Q)
    reasons: List[str] = []
    steps = 0
    while True:
        found = _first_effective(P, Q, ctx)
        if found is None:
            break
        steps += 1
        if steps > ctx.max_diff_steps:
            raise StepLimitExceeded(f"set difference did not finish within {ctx.max_diff_steps} steps")
        i, j, t_ct, overlap = found
        s_ct = P[i]
        if overlap.verdict.is_unknown:
            reasons.append(overlap.verdict.reason)
        sigma = overlap.mgu
        new_p, more_p = _pieces(s_ct, t_ct, sigma, ctx)
        new_q, more_q = _pieces(t_ct, s_ct, sigma, ctx)
        reasons += more_p + more_q
        logger.debug(
            "step %d: %s minus %s (|P|=%d, |Q|=%d)", steps, s_ct, t_ct, len(P), len(Q)
        )
        weight_before = diff_weight(P, Q, ctx) if trace is not None else []
        rest_p = P[:i] + P[i + 1:]
        isolated = trace is not None and all(_overlap_with(o, Q[j], ctx) is None for o in rest_p)
        P = dotted_union(rest_p, new_p, ctx.equiv_mode, ctx)
        Q = dotted_union(Q[:j] + Q[j + 1:], new_q, ctx.equiv_mode, ctx)
        if trace is not None:
            trace.append(DiffStep(
                dividend=s_ct,
                divisor=t_ct,
                dividend_pieces=new_p,
                divisor_pieces=new_q,
                weight_before=weight_before,
                weight_after=diff_weight(P, Q, ctx),
                dividend_weight=weight_before[i],
                piece_weights=diff_weight(new_p, Q, ctx),
                isolated=isolated,
            ))
    return DiffOutcome.of(P, reasons)

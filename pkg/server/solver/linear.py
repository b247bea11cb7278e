"""
Linear Integer Constraints and Fourier-Motzkin Elimination
==========================================================

Constraints are kept in the normal form ``sum(a_i * x_i) <= b`` with
integer coefficients divided by their gcd and the bound tightened by
flooring. Eliminating a variable whose coefficients are all ``+1``/``-1``
is exact over the integers; any other elimination is only a real
relaxation, which is still sound for proving unsatisfiability.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from server.lctrs.errors import EvaluationError
from server.lctrs.terms import (
    DIV, EXP, INT, MINUS, MOD, NEG, PLUS, TIMES, App, Term, Var,
    int_value, mk_app, LE,
)
from server.solver.evaluation import euclidean_div, euclidean_mod

logger = logging.getLogger(__name__)

MAX_CONSTRAINTS = 4000

Expression = Tuple[Dict[Var, int], int]


def linearize(t: Term) -> Optional[Expression]:
    """Coefficients and constant of an int term, or ``None`` when it is not linear."""
    if isinstance(t, Var):
        return ({t: 1}, 0) if t.sort == INT else None
    symbol = t.symbol
    if symbol.is_value:
        return ({}, symbol.value) if t.sort == INT else None
    parts = [linearize(a) for a in t.args]
    if any(p is None for p in parts):
        return None
    if symbol == PLUS:
        return _combine(parts[0], parts[1], 1)
    if symbol == MINUS:
        return _combine(parts[0], parts[1], -1)
    if symbol == NEG:
        return _scale(parts[0], -1)
    if symbol == TIMES:
        left, right = parts
        if not left[0]:
            return _scale(right, left[1])
        if not right[0]:
            return _scale(left, right[1])
        return None
    if symbol in (DIV, MOD, EXP) and not parts[0][0] and not parts[1][0]:
        a, b = parts[0][1], parts[1][1]
        try:
            if symbol == DIV:
                return {}, euclidean_div(a, b)
            if symbol == MOD:
                return {}, euclidean_mod(a, b)
            if b < 0:
                return None
            return {}, a ** b
        except EvaluationError:
            return None
    return None


def _combine(left: Expression, right: Expression, sign: int) -> Expression:
    coeffs = dict(left[0])
    for v, a in right[0].items():
        coeffs[v] = coeffs.get(v, 0) + sign * a
    return {v: a for v, a in coeffs.items() if a}, left[1] + sign * right[1]


def _scale(expr: Expression, factor: int) -> Expression:
    if factor == 0:
        return {}, 0
    return {v: a * factor for v, a in expr[0].items()}, expr[1] * factor


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeff * var) <= bound`` with coefficients ordered by variable name."""
    coeffs: Tuple[Tuple[Var, int], ...]
    bound: int

    @classmethod
    def of(cls, coeffs: Dict[Var, int], bound: int) -> "LinearConstraint":
        items = sorted(((v, a) for v, a in coeffs.items() if a), key=lambda item: item[0].name)
        if not items:
            return cls((), bound)
        g = 0
        for _, a in items:
            g = gcd(g, abs(a))
        return cls(tuple((v, a // g) for v, a in items), bound // g)

    @classmethod
    def less_equal(cls, lhs: Expression, rhs: Expression) -> "LinearConstraint":
        diff, const = _combine(lhs, rhs, -1)
        return cls.of(diff, -const)

    def coeff(self, v: Var) -> int:
        for var, a in self.coeffs:
            if var == v:
                return a
        return 0

    @property
    def variables(self) -> List[Var]:
        return [v for v, _ in self.coeffs]

    @property
    def is_trivial(self) -> bool:
        return not self.coeffs

    @property
    def holds_trivially(self) -> bool:
        return not self.coeffs and self.bound >= 0

    def to_term(self) -> Term:
        """Rebuild ``lhs <= bound`` as a theory term."""
        total: Optional[Term] = None
        for v, a in self.coeffs:
            summand: Term = v if a == 1 else mk_app(TIMES, int_value(a), v)
            total = summand if total is None else mk_app(PLUS, total, summand)
        if total is None:
            total = int_value(0)
        return mk_app(LE, total, int_value(self.bound))

    def __str__(self) -> str:
        lhs = " + ".join(f"{a}*{v}" for v, a in self.coeffs) or "0"
        return f"{lhs} <= {self.bound}"


class FmVerdict(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass
class FmResult:
    verdict: FmVerdict
    model: Dict[Var, int]
    reason: str = ""


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def _dedupe(constraints: Iterable[LinearConstraint]) -> List[LinearConstraint]:
    return list(dict.fromkeys(constraints))


def _is_unit_in(v: Var, constraints: Sequence[LinearConstraint]) -> bool:
    return all(abs(c.coeff(v)) <= 1 for c in constraints)


def _pick(candidates: Sequence[Var], work: Sequence[LinearConstraint]) -> Tuple[Var, bool]:
    """Prefer exact eliminations, then the smallest lower*upper product."""
    def cost(v: Var) -> int:
        lowers = sum(1 for c in work if c.coeff(v) < 0)
        uppers = sum(1 for c in work if c.coeff(v) > 0)
        return lowers * uppers - lowers - uppers

    units = [v for v in candidates if _is_unit_in(v, work)]
    pool = units or list(candidates)
    chosen = min(pool, key=lambda v: (cost(v), v.name))
    return chosen, bool(units)


def _eliminate(work: List[LinearConstraint], v: Var) -> Tuple[List[LinearConstraint], List[LinearConstraint]]:
    """Project ``v`` away; returns (new constraints, constraints that mentioned v)."""
    lowers = [c for c in work if c.coeff(v) < 0]
    uppers = [c for c in work if c.coeff(v) > 0]
    rest = [c for c in work if c.coeff(v) == 0]
    combined = []
    for low in lowers:
        a_low = -low.coeff(v)
        for up in uppers:
            a_up = up.coeff(v)
            coeffs: Dict[Var, int] = {}
            for var, a in low.coeffs:
                coeffs[var] = coeffs.get(var, 0) + a * a_up
            for var, a in up.coeffs:
                coeffs[var] = coeffs.get(var, 0) + a * a_low
            coeffs.pop(v, None)
            combined.append(LinearConstraint.of(coeffs, low.bound * a_up + up.bound * a_low))
    return _dedupe(rest + combined), lowers + uppers


def _contradiction(work: Sequence[LinearConstraint]) -> bool:
    return any(c.is_trivial and c.bound < 0 for c in work)


def fm_solve(constraints: Iterable[LinearConstraint]) -> FmResult:
    """Decide a conjunction of linear constraints over the integers."""
    work = _dedupe(constraints)
    history: List[Tuple[Var, List[LinearConstraint]]] = []
    exact = True
    while True:
        if _contradiction(work):
            return FmResult(FmVerdict.UNSAT, {})
        work = [c for c in work if not c.is_trivial]
        if not work:
            break
        candidates = list(dict.fromkeys(v for c in work for v in c.variables))
        v, unit = _pick(candidates, work)
        exact = exact and unit
        work, mentioned = _eliminate(work, v)
        history.append((v, mentioned))
        if len(work) > MAX_CONSTRAINTS:
            return FmResult(FmVerdict.UNKNOWN, {}, "fourier-motzkin blow-up")

    model: Dict[Var, int] = {}
    for v, mentioned in reversed(history):
        low, high = None, None
        for c in mentioned:
            a = c.coeff(v)
            residual = c.bound - sum(b * model.get(x, 0) for x, b in c.coeffs if x != v)
            if a > 0:
                bound = residual // a
                high = bound if high is None else min(high, bound)
            else:
                bound = _ceil_div(residual, a)
                low = bound if low is None else max(low, bound)
        if low is not None and high is not None and low > high:
            reason = "no integer point in the real shadow" if not exact else "inconsistent back-substitution"
            return FmResult(FmVerdict.UNKNOWN, {}, reason)
        model[v] = _nearest_zero(low, high)
    return FmResult(FmVerdict.SAT, model)


def _nearest_zero(low: Optional[int], high: Optional[int]) -> int:
    if low is not None and low > 0:
        return low
    if high is not None and high < 0:
        return high
    return 0


def fm_project(constraints: Iterable[LinearConstraint], eliminate: Sequence[Var]) -> Optional[List[LinearConstraint]]:
    """
    Exact integer projection of the given variables, or ``None`` when some
    variable can only be eliminated with a non-unit coefficient.
    """
    work = _dedupe(constraints)
    pending = [v for v in eliminate]
    while pending:
        if _contradiction(work):
            return [LinearConstraint((), -1)]
        work = [c for c in work if not c.is_trivial]
        present = [v for v in pending if any(c.coeff(v) for c in work)]
        if not present:
            break
        v, unit = _pick(present, work)
        if not unit:
            return None
        work, _ = _eliminate(work, v)
        pending.remove(v)
        if len(work) > MAX_CONSTRAINTS:
            return None
    if _contradiction(work):
        return [LinearConstraint((), -1)]
    return [c for c in work if not c.is_trivial]

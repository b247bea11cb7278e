"""
Builtin Constraint Solver
=========================

Negation normal form, a lazily expanded disjunctive normal form and
Fourier-Motzkin elimination per disjunct. Boolean variables are handled
propositionally. Every Sat verdict is re-checked by ground evaluation;
a model that fails the check turns the verdict into Unknown.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from server.lctrs.errors import EvaluationError
from server.lctrs.terms import (
    AND, BOOL, EQ_BOOL, EQ_INT, FALSE, GE, GT, IFF, IMPLIES, INT, LE, LT,
    NEQ_BOOL, NEQ_INT, NOT, OR, TRUE, App, Term, Var,
    conjunction, disjunction, is_ground, mk_app, mk_not, variables,
)
from server.solver.evaluation import eval_ground, eval_under
from server.solver.linear import (
    Expression, FmVerdict, LinearConstraint, fm_project, fm_solve, linearize,
)
from server.solver.results import EquivVerdict, SatResult
from server.solver.simplify import simplify

logger = logging.getLogger(__name__)

MAX_DISJUNCTS = 20000


# ============================================================================
# NEGATION NORMAL FORM
# ============================================================================

@dataclass(frozen=True)
class Linear:
    """Conjunction of linear constraints coming from one comparison."""
    constraints: Tuple[LinearConstraint, ...]


@dataclass(frozen=True)
class Disequal:
    """``l != r``, split into ``l < r`` or ``l > r`` during expansion."""
    below: LinearConstraint
    above: LinearConstraint


@dataclass(frozen=True)
class BoolLiteral:
    var: Var
    positive: bool

    def to_term(self) -> Term:
        return self.var if self.positive else mk_not(self.var)


@dataclass(frozen=True)
class Opaque:
    """An atom outside linear integer arithmetic."""
    atom: Term


Literal = Union[Linear, Disequal, BoolLiteral, Opaque, bool]
Node = Union[Literal, Tuple[str, Tuple["Node", ...]]]

_FLIP = {LE: GT, GT: LE, LT: GE, GE: LT, EQ_INT: NEQ_INT, NEQ_INT: EQ_INT}


def _shift(expr: Expression, by: int) -> Expression:
    return expr[0], expr[1] + by


def _comparison(symbol, atom: App) -> Literal:
    left, right = (linearize(a) for a in atom.args)
    if left is None or right is None:
        return Opaque(atom)
    le = LinearConstraint.less_equal
    if symbol == LE:
        return Linear((le(left, right),))
    if symbol == LT:
        return Linear((le(_shift(left, 1), right),))
    if symbol == GE:
        return Linear((le(right, left),))
    if symbol == GT:
        return Linear((le(_shift(right, 1), left),))
    if symbol == EQ_INT:
        return Linear((le(left, right), le(right, left)))
    return Disequal(le(_shift(left, 1), right), le(_shift(right, 1), left))


def to_nnf(phi: Term, positive: bool = True) -> Node:
    if isinstance(phi, Var):
        return BoolLiteral(phi, positive)
    symbol = phi.symbol
    if symbol.is_value:
        return bool(symbol.value) == positive
    if symbol == NOT:
        return to_nnf(phi.args[0], not positive)
    if symbol in (AND, OR):
        children = tuple(to_nnf(a, positive) for a in phi.args)
        conjunctive = (symbol == AND) == positive
        return ("and" if conjunctive else "or", children)
    if symbol == IMPLIES:
        a, b = phi.args
        if positive:
            return ("or", (to_nnf(a, False), to_nnf(b, True)))
        return ("and", (to_nnf(a, True), to_nnf(b, False)))
    if symbol in (IFF, EQ_BOOL, NEQ_BOOL):
        a, b = phi.args
        same = positive if symbol != NEQ_BOOL else not positive
        if same:
            return ("or", (("and", (to_nnf(a, True), to_nnf(b, True))),
                           ("and", (to_nnf(a, False), to_nnf(b, False)))))
        return ("or", (("and", (to_nnf(a, True), to_nnf(b, False))),
                       ("and", (to_nnf(a, False), to_nnf(b, True)))))
    if symbol in _FLIP:
        return _comparison(symbol if positive else _FLIP[symbol], phi)
    return Opaque(phi if positive else mk_not(phi))


# ============================================================================
# DISJUNCTIVE NORMAL FORM
# ============================================================================

def _product(children: Sequence[Node]) -> Iterator[List[Literal]]:
    if not children:
        yield []
        return
    for head in _expand(children[0]):
        for tail in _product(children[1:]):
            yield head + tail


def _expand(node: Node) -> Iterator[List[Literal]]:
    if node is True:
        yield []
    elif node is False:
        return
    elif isinstance(node, tuple):
        kind, children = node
        if kind == "and":
            yield from _product(children)
        else:
            for child in children:
                yield from _expand(child)
    elif isinstance(node, Disequal):
        yield [Linear((node.below,))]
        yield [Linear((node.above,))]
    else:
        yield [node]


def dnf(phi: Term) -> Iterator[List[Literal]]:
    """Lazily enumerate the disjuncts of ``phi`` as literal lists."""
    return _expand(to_nnf(phi))


def _split(literals: Sequence[Literal]):
    linear: List[LinearConstraint] = []
    polarity = {}
    opaque: List[Opaque] = []
    for lit in literals:
        if isinstance(lit, Linear):
            linear.extend(lit.constraints)
        elif isinstance(lit, BoolLiteral):
            if polarity.setdefault(lit.var, lit.positive) != lit.positive:
                return None
        elif isinstance(lit, Opaque):
            opaque.append(lit)
    return linear, polarity, opaque


def _solve_disjunct(literals: Sequence[Literal]) -> SatResult:
    parts = _split(literals)
    if parts is None:
        return SatResult.unsat()
    linear, polarity, opaque = parts
    result = fm_solve(linear)
    if result.verdict is FmVerdict.UNSAT:
        return SatResult.unsat()
    if opaque:
        return SatResult.unknown(f"non-linear atom {opaque[0].atom}")
    if result.verdict is FmVerdict.UNKNOWN:
        return SatResult.unknown(result.reason)
    model = dict(result.model)
    model.update(polarity)
    return SatResult.sat(model)


def _complete(model, free: Sequence[Var]):
    full = {}
    for v in free:
        full[v] = model.get(v, False if v.sort == BOOL else 0)
    return full


# ============================================================================
# ENTRY POINTS
# ============================================================================

def builtin_sat(phi: Term) -> SatResult:
    """Sat with a checked model, Unsat, or Unknown for the non-linear/non-exact rest."""
    phi = simplify(phi)
    if is_ground(phi):
        try:
            return SatResult.sat({}) if eval_ground(phi) else SatResult.unsat()
        except EvaluationError as exc:
            return SatResult.unknown(str(exc))
    free = variables(phi)
    pending_reason = ""
    for count, disjunct in enumerate(dnf(phi), start=1):
        if count > MAX_DISJUNCTS:
            return SatResult.unknown("disjunctive normal form too large")
        result = _solve_disjunct(disjunct)
        if result.is_sat:
            model = _complete(result.model, free)
            try:
                if eval_under(phi, model) is True:
                    return SatResult.sat(model)
            except EvaluationError as exc:
                pending_reason = str(exc)
                continue
            pending_reason = "model failed the evaluation check"
            logger.warning("builtin model %s does not satisfy %s", model, phi)
        elif result.is_unknown:
            pending_reason = result.reason
    if pending_reason:
        return SatResult.unknown(pending_reason)
    return SatResult.unsat()


def eliminate_exists(phi: Term, bound: Sequence[Var]) -> Optional[Term]:
    """A quantifier-free equivalent of ``exists bound. phi``, or ``None``."""
    phi = simplify(phi)
    bound = [v for v in bound if v in set(variables(phi))]
    if not bound:
        return phi
    int_bound = [v for v in bound if v.sort == INT]
    bool_bound = set(v for v in bound if v.sort == BOOL)
    pieces: List[Term] = []
    for count, disjunct in enumerate(dnf(phi), start=1):
        if count > MAX_DISJUNCTS:
            return None
        parts = _split(disjunct)
        if parts is None:
            continue
        linear, polarity, opaque = parts
        if opaque:
            return None
        projected = fm_project(linear, int_bound)
        if projected is None:
            return None
        if any(c.is_trivial and c.bound < 0 for c in projected):
            continue
        kept = [BoolLiteral(v, p).to_term() for v, p in polarity.items() if v not in bool_bound]
        pieces.append(conjunction([c.to_term() for c in projected] + kept))
    if any(p == TRUE for p in pieces):
        return TRUE
    return disjunction(pieces) if pieces else FALSE


def builtin_equiv(phi: Term, psi: Term, exist_phi: Sequence[Var], exist_psi: Sequence[Var]) -> EquivVerdict:
    left = eliminate_exists(phi, exist_phi)
    right = eliminate_exists(psi, exist_psi)
    if left is None or right is None:
        return EquivVerdict.UNKNOWN
    result = builtin_sat(mk_not(mk_app(IFF, left, right)))
    if result.is_unsat:
        return EquivVerdict.EQUIV
    if result.is_sat:
        return EquivVerdict.NOT_EQUIV
    return EquivVerdict.UNKNOWN

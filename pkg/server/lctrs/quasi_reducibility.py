"""
Quasi-Reducibility
==================

An LCTRS is quasi-reducible when every ground pattern ``f(v1, ..., vn)``
(``f`` defined, arguments ground constructor terms) is a redex. For a
left-linear system this holds exactly when the complement of the
left-hand sides, computed per defined symbol by subtracting the rules'
constrained left-hand sides from ``f(x1, ..., xn) [true]``, is empty.

Also provides ground rewriting (leftmost-innermost, calculation steps
included) used by the oracle and by the examples.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

from server.lctrs.complement import variable_hint
from server.lctrs.constrained import ConstrainedTerm, canonicalize, dotted_union, value_free
from server.lctrs.context import AnalysisContext
from server.lctrs.difference import DiffOutcome, diff_sets
from server.lctrs.errors import (
    Diagnostic, EvaluationError, InconclusiveSatisfiability, LctrsError, Severity, SortMismatch,
    SourceSpan, StepLimitExceeded, ValidationFailed,
)
from server.lctrs.terms import (
    BOOL, FALSE, INT, TRUE, App, FunctionSymbol, Signature, SymbolKind, Substitution, Term, Var,
    int_value, is_linear, is_pattern, is_theory_term, is_value, more_general, theory_value, variables,
)
from server.solver.backend import ConstraintSolver
from server.solver.builtin import builtin_sat
from server.solver.evaluation import eval_ground

logger = logging.getLogger(__name__)


# ============================================================================
# RULES AND SYSTEMS
# ============================================================================

@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    guard: Term = TRUE
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def __post_init__(self):
        if self.lhs.sort != self.rhs.sort:
            raise SortMismatch(f"rule {self.lhs} -> {self.rhs} changes sort {self.lhs.sort} to {self.rhs.sort}")
        if isinstance(self.lhs, Var) or is_theory_term(self.lhs):
            raise LctrsError(f"left-hand side {self.lhs} must be rooted by a non-theory symbol")
        ConstrainedTerm(self.lhs, self.guard)

    @property
    def logical_variables(self) -> List[Var]:
        lhs_vars = variables(self.lhs)
        return variables(self.guard) + [v for v in variables(self.rhs) if v not in lhs_vars and v not in variables(self.guard)]

    @property
    def constrained_lhs(self) -> ConstrainedTerm:
        return ConstrainedTerm(self.lhs, self.guard)

    def __str__(self) -> str:
        if self.guard == TRUE:
            return f"{self.lhs} -> {self.rhs}"
        return f"{self.lhs} -> {self.rhs} [{self.guard}]"


@dataclass
class Lctrs:
    signature: Signature
    rules: List[Rule] = field(default_factory=list)

    def with_rules(self, extra: Sequence[Rule]) -> "Lctrs":
        return Lctrs(self.signature, list(self.rules) + list(extra))


def validate(system: Lctrs) -> List[Diagnostic]:
    """Check the hypotheses of the decision procedure."""
    diagnostics: List[Diagnostic] = []
    for symbol in system.signature.symbols.values():
        if symbol.kind is SymbolKind.CONSTRUCTOR and symbol.result_sort.is_theory:
            diagnostics.append(Diagnostic(
                Severity.ERROR, "theory-constructor",
                f"constructor {symbol.name} has theory result sort {symbol.result_sort}",
            ))
    for rule in system.rules:
        if not is_linear(rule.lhs):
            diagnostics.append(Diagnostic(
                Severity.ERROR, "non-left-linear", f"left-hand side {rule.lhs} is not linear", rule.span,
            ))
        if not is_pattern(rule.lhs, system.signature):
            diagnostics.append(Diagnostic(
                Severity.WARNING, "non-pattern-lhs",
                f"left-hand side {rule.lhs} is not a pattern; the rule is ignored by the complement", rule.span,
            ))
    return diagnostics


# ============================================================================
# COMPLEMENT OF LEFT-HAND SIDES
# ============================================================================

def generic_pattern(f: FunctionSymbol, ctx: AnalysisContext) -> ConstrainedTerm:
    args = tuple(ctx.fresh.fresh(sort, variable_hint(sort, (i,))) for i, sort in enumerate(f.arg_sorts, start=1))
    return ConstrainedTerm(App(f, args), TRUE)


def copat_f(Q: Sequence[ConstrainedTerm], f: FunctionSymbol, ctx: AnalysisContext) -> DiffOutcome:
    """Ground ``f``-patterns not covered by ``Q``; only ``f``-rooted members matter."""
    rooted = [ct for ct in Q if isinstance(ct.term, App) and ct.term.symbol == f]
    ctx.reserve(*Q)
    return diff_sets([generic_pattern(f, ctx)], rooted, ctx)


def copat(Q: Sequence[ConstrainedTerm], ctx: AnalysisContext) -> DiffOutcome:
    result: List[ConstrainedTerm] = []
    reasons: List[str] = []
    for f in ctx.signature.defined_symbols():
        outcome = copat_f(Q, f, ctx)
        logger.debug("complement for %s: %d pattern(s), %s", f, len(outcome), outcome.status.value)
        result = dotted_union(result, outcome.result, ctx.equiv_mode, ctx)
        reasons += outcome.reasons
    return DiffOutcome.of(result, reasons)


class QrKind(Enum):
    QUASI_REDUCIBLE = "quasi-reducible"
    NOT_QUASI_REDUCIBLE = "not-quasi-reducible"
    UNKNOWN = "unknown"


@dataclass
class QrVerdict:
    kind: QrKind
    witnesses: List[ConstrainedTerm] = field(default_factory=list)
    reason: str = ""
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def is_quasi_reducible(self) -> bool:
        return self.kind is QrKind.QUASI_REDUCIBLE


def left_hand_sides(system: Lctrs, ctx: AnalysisContext) -> List[ConstrainedTerm]:
    ctx.reserve(*(r.lhs for r in system.rules), *(r.guard for r in system.rules))
    return [
        value_free(rule.constrained_lhs, ctx.fresh)
        for rule in system.rules
        if is_pattern(rule.lhs, system.signature)
    ]


def quasi_reducible(system: Lctrs, ctx: Optional[AnalysisContext] = None) -> QrVerdict:
    diagnostics = validate(system)
    errors = [d for d in diagnostics if d.is_error]
    if errors:
        raise ValidationFailed(errors)
    warnings = [d for d in diagnostics if not d.is_error]
    for warning in warnings:
        logger.warning("%s", warning)

    owned = ctx is None
    ctx = ctx or AnalysisContext(system.signature)
    try:
        outcome = copat(left_hand_sides(system, ctx), ctx)
    finally:
        if owned:
            ctx.close()

    witnesses = [canonicalize(w) for w in outcome.result]
    excluded = any(d.code == "non-pattern-lhs" for d in warnings)
    if not outcome.is_exact:
        verdict = QrVerdict(QrKind.UNKNOWN, witnesses, "; ".join(outcome.reasons), warnings)
    elif not witnesses:
        verdict = QrVerdict(QrKind.QUASI_REDUCIBLE, [], "", warnings)
    elif excluded:
        verdict = QrVerdict(QrKind.UNKNOWN, witnesses, "rules with non-pattern left-hand sides were ignored", warnings)
    else:
        verdict = QrVerdict(QrKind.NOT_QUASI_REDUCIBLE, witnesses, "", warnings)
    logger.info("verdict: %s (%d witness(es))", verdict.kind.value, len(witnesses))
    return verdict


def default_rhs(sort, signature: Signature) -> Term:
    if sort == INT:
        return int_value(0)
    if sort == BOOL:
        return FALSE
    for c in signature.constructors(sort):
        if c.arity == 0:
            return App(c)
    raise LctrsError(f"sort {sort} has no constant constructor to use as a right-hand side")


def complete_with_witnesses(system: Lctrs, rhs: Optional[Term] = None,
                            ctx: Optional[AnalysisContext] = None) -> Lctrs:
    """Add one rule per witness so that the completed system is quasi-reducible."""
    verdict = quasi_reducible(system, ctx)
    if verdict.kind is QrKind.UNKNOWN:
        raise InconclusiveSatisfiability(verdict.reason)
    added = []
    for w in verdict.witnesses:
        right = rhs if rhs is not None else default_rhs(w.term.sort, system.signature)
        added.append(Rule(w.term, right, w.constraint))
    return system.with_rules(added)


# ============================================================================
# GROUND REWRITING
# ============================================================================

def _calculation_result(t: App) -> Optional[Term]:
    if t.symbol.kind is not SymbolKind.CALCULATION or not all(is_value(a) for a in t.args):
        return None
    try:
        return theory_value(eval_ground(t))
    except EvaluationError:
        return None


def match_rule(rule: Rule, t: Term, solver: Optional[ConstraintSolver] = None) -> Optional[Substitution]:
    """
    A substitution with ``lhs`` mapped onto ``t`` whose logical variables are
    values satisfying the guard. Guards left with free variables go to
    ``solver``, or to the builtin procedure when none is given.
    """
    gamma = more_general(rule.lhs, t)
    if gamma is None:
        return None
    if any(not is_value(gamma.image(x)) for x in variables(rule.guard) if x in gamma):
        return None
    guard = gamma.apply(rule.guard)
    free = variables(guard, gamma.apply(rule.rhs))
    if not variables(guard):
        try:
            if eval_ground(guard) is not True:
                return None
        except EvaluationError:
            return None
        model = {}
    else:
        result = solver.is_satisfiable(guard) if solver is not None else builtin_sat(guard)
        if not result.is_sat:
            if result.is_unknown:
                logger.warning("guard %s undecided (%s); rule not applied to %s", guard, result.reason, t)
            return None
        model = result.model
    extension = {v: theory_value(model.get(v, False if v.sort == BOOL else 0)) for v in free}
    return Substitution({**gamma, **extension})


def is_redex(t: Term, system: Lctrs, solver: Optional[ConstraintSolver] = None) -> bool:
    if isinstance(t, Var):
        return False
    if _calculation_result(t) is not None:
        return True
    return any(match_rule(rule, t, solver) is not None for rule in system.rules)


def _root_step(t: Term, system: Lctrs, solver: Optional[ConstraintSolver]) -> Optional[Term]:
    if isinstance(t, Var):
        return None
    value = _calculation_result(t)
    if value is not None:
        return value
    for rule in system.rules:
        gamma = match_rule(rule, t, solver)
        if gamma is not None:
            return gamma.apply(rule.rhs)
    return None


def rewrite_step(t: Term, system: Lctrs, solver: Optional[ConstraintSolver] = None) -> Optional[Term]:
    """One leftmost-innermost step, or ``None`` for a normal form."""
    if isinstance(t, App):
        for index, arg in enumerate(t.args):
            reduced = rewrite_step(arg, system, solver)
            if reduced is not None:
                return App(t.symbol, t.args[:index] + (reduced,) + t.args[index + 1:])
    return _root_step(t, system, solver)


def normalize(t: Term, system: Lctrs, max_steps: int = 10000,
              solver: Optional[ConstraintSolver] = None) -> Term:
    for _ in range(max_steps):
        reduced = rewrite_step(t, system, solver)
        if reduced is None:
            return t
        t = reduced
    raise StepLimitExceeded(f"no normal form within {max_steps} steps")

"""
Cosmetic constraint normalization: flatten conjunctions and disjunctions,
drop neutral elements and collapse double negation. Never needed for
correctness; it only keeps printed constraints close to hand-written ones.
"""

from typing import List

from server.lctrs.terms import AND, FALSE, NOT, OR, TRUE, App, Term, conjunction, disjunction, mk_not


def conjuncts(phi: Term) -> List[Term]:
    if isinstance(phi, App) and phi.symbol == AND:
        return conjuncts(phi.args[0]) + conjuncts(phi.args[1])
    return [phi]


def disjuncts(phi: Term) -> List[Term]:
    if isinstance(phi, App) and phi.symbol == OR:
        return disjuncts(phi.args[0]) + disjuncts(phi.args[1])
    return [phi]


def simplify(phi: Term) -> Term:
    if not isinstance(phi, App) or not phi.args:
        return phi
    if phi.symbol == AND:
        parts = [p for c in conjuncts(phi) for p in conjuncts(simplify(c)) if p != TRUE]
        return FALSE if FALSE in parts else conjunction(parts)
    if phi.symbol == OR:
        parts = [p for d in disjuncts(phi) for p in disjuncts(simplify(d)) if p != FALSE]
        return TRUE if TRUE in parts else disjunction(parts)
    if phi.symbol == NOT:
        inner = simplify(phi.args[0])
        if inner == TRUE:
            return FALSE
        if inner == FALSE:
            return TRUE
        if isinstance(inner, App) and inner.symbol == NOT:
            return inner.args[0]
        return mk_not(inner)
    return App(phi.symbol, tuple(simplify(a) for a in phi.args))

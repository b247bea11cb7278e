"""
Complements of Linear Constructor Terms
=======================================

Cocterm, Cosubst and Copattern over a signature. Results are lists in
canonical order (sorted by term serialization); set equality up to
renaming is the contract.
"""

import itertools
import logging
from typing import List

from server.lctrs.errors import InfiniteComplement, NonLinearTerm, NotConstructorTerm
from server.lctrs.terms import (
    BOOL,
    INT,
    App,
    FreshVariables,
    Position,
    Signature,
    Sort,
    Substitution,
    Term,
    Var,
    is_constructor_term,
    is_linear,
    term_key,
    variables,
)

logger = logging.getLogger(__name__)


def variable_hint(sort: Sort, position: Position) -> str:
    stem = "x" if sort == INT else "b" if sort == BOOL else sort.name[:1] + "s"
    return stem + "".join(str(i) for i in position)


def _generic(symbol, position: Position, fresh: FreshVariables) -> App:
    args = tuple(
        fresh.fresh(sort, variable_hint(sort, position + (i,)))
        for i, sort in enumerate(symbol.arg_sorts, start=1)
    )
    return App(symbol, args)


def _cocterm(u: Term, sig: Signature, fresh: FreshVariables, position: Position) -> List[Term]:
    if isinstance(u, Var):
        return []
    if u.sort.is_theory and sig.values_of(u.sort) is None:
        raise InfiniteComplement(f"{u} has sort {u.sort}, whose values are infinite")
    result: List[Term] = [
        _generic(c, position, fresh) for c in sig.constructors(u.sort) if c != u.symbol
    ]
    for i, arg in enumerate(u.args, start=1):
        for alternative in _cocterm(arg, sig, fresh, position + (i,)):
            tail = tuple(
                fresh.fresh(a.sort, variable_hint(a.sort, position + (j,)))
                for j, a in enumerate(u.args[i:], start=i + 1)
            )
            result.append(App(u.symbol, u.args[:i - 1] + (alternative,) + tail))
    return result


def cocterm(u: Term, sig: Signature, fresh: FreshVariables) -> List[Term]:
    """Finite complement of a linear constructor term (empty for a variable)."""
    if not is_constructor_term(u):
        raise NotConstructorTerm(f"{u} is not a constructor term")
    if not is_linear(u):
        raise NonLinearTerm(f"{u} is not linear; its complement is not finite in general")
    fresh.reserve(u)
    return sorted(_cocterm(u, sig, fresh, ()), key=term_key)


def cosubst(sigma: Substitution, sig: Signature, fresh: FreshVariables) -> List[Substitution]:
    """All ρ ≠ σ over Dom(σ) with each xρ in cocterm(xσ) ∪ {xσ}."""
    domain = sorted(sigma, key=lambda v: v.name)
    options = []
    for x in domain:
        image = sigma[x]
        if not is_constructor_term(image):
            raise NotConstructorTerm(f"{x} -> {image} is not a constructor binding")
        options.append([image] + cocterm(image, sig, fresh))
    result = []
    for choice in itertools.product(*options):
        if all(c is o[0] for c, o in zip(choice, options)):
            continue
        result.append(Substitution(dict(zip(domain, choice))))
    return result


def copattern(s: Term, sigma: Substitution, sig: Signature, fresh: FreshVariables) -> List[Term]:
    """{sρ : ρ ∈ cosubst(σ|Var(s)), sρ ≠ sσ} in canonical order."""
    fresh.reserve(s)
    restricted = sigma.restrict(variables(s))
    instance = restricted.apply(s)
    found = {}
    for rho in cosubst(restricted, sig, fresh):
        candidate = rho.apply(s)
        if candidate != instance:
            found.setdefault(candidate, None)
    logger.debug("copattern of %s under %s: %d member(s)", s, sigma, len(found))
    return sorted(found, key=term_key)

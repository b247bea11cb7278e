"""Pretty-printing in the same text format the parser reads."""

from typing import Iterable, List, Optional

from server.lctrs.constrained import ConstrainedTerm, canonical_renaming, canonicalize
from server.lctrs.quasi_reducibility import Lctrs, Rule
from server.lctrs.terms import (
    NEG, NOT, TRUE, App, Signature, SymbolKind, Term, Var, is_value, value_of, variables,
)

_LEVELS = {
    "<=>": 1, "=>": 1,
    "\\/": 2,
    "/\\": 3,
    "not": 4,
    "=": 5, "!=": 5, "<=": 5, "<": 5, ">=": 5, ">": 5,
    "+": 6, "-": 6,
    "*": 7, "div": 7, "mod": 7, "exp": 7,
}
_RIGHT_ASSOC = {"<=>", "=>"}
_UNARY_LEVEL = 8
_ATOM = 9


def _level(t: Term) -> int:
    if isinstance(t, Var) or t.symbol.kind is not SymbolKind.CALCULATION:
        return _ATOM
    if t.symbol == NEG:
        return _UNARY_LEVEL
    return _LEVELS[t.symbol.name]


def _wrap(t: Term, minimum: int) -> str:
    text = print_term(t)
    return f"({text})" if _level(t) < minimum else text


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    symbol = t.symbol
    if symbol.kind is SymbolKind.VALUE:
        value = value_of(t)
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)
    if symbol.kind is not SymbolKind.CALCULATION:
        if not t.args:
            return symbol.name
        return f"{symbol.name}({', '.join(print_term(a) for a in t.args)})"
    if symbol == NEG:
        (operand,) = t.args
        if is_value(operand):
            return f"-({print_term(operand)})"
        return "-" + _wrap(operand, _UNARY_LEVEL)
    if symbol == NOT:
        (operand,) = t.args
        return "not " + _wrap(operand, _ATOM)
    level = _LEVELS[symbol.name]
    left, right = t.args
    if level == 5:
        left_min = right_min = 6
    elif symbol.name in _RIGHT_ASSOC:
        left_min, right_min = level + 1, level
    else:
        left_min, right_min = level, level + 1
    return f"{_wrap(left, left_min)} {symbol.name} {_wrap(right, right_min)}"


def print_constraint(phi: Term) -> str:
    return print_term(phi)


def print_constrained_pattern(ct: ConstrainedTerm, canonical: bool = True) -> str:
    if canonical:
        ct = canonicalize(ct)
    return f"{print_term(ct.term)} [{print_constraint(ct.constraint)}]"


def print_rule(rule: Rule) -> str:
    renaming = canonical_renaming(variables(rule.lhs, rule.rhs, rule.guard))
    lhs, rhs, guard = (renaming.apply(t) for t in (rule.lhs, rule.rhs, rule.guard))
    text = f"{print_term(lhs)} -> {print_term(rhs)}"
    if guard != TRUE:
        text += f" [{print_constraint(guard)}]"
    return text


def _signature_lines(signature: Signature) -> List[str]:
    lines = []
    user_sorts = [s.name for s in signature.term_sorts()]
    if user_sorts:
        lines.append(f"SORTS {' '.join(user_sorts)} ;")
    if signature.int_values is not None and signature.int_values:
        lines.append(f"INTS {signature.int_values[0]} .. {signature.int_values[-1]} ;")
    lines.append("SIGNATURE")
    for symbol in signature.symbols.values():
        if symbol.arg_sorts:
            args = " * ".join(s.name for s in symbol.arg_sorts)
            lines.append(f"  {symbol.name} : {args} => {symbol.result_sort.name} ;")
        else:
            lines.append(f"  {symbol.name} : {symbol.result_sort.name} ;")
    return lines


def print_patterns(patterns: Iterable[ConstrainedTerm], signature: Optional[Signature] = None) -> str:
    lines = _signature_lines(signature) if signature is not None else []
    lines.append("PATTERNS")
    lines.extend(f"  {print_constrained_pattern(ct)} ;" for ct in patterns)
    return "\n".join(lines) + "\n"


def print_lctrs(system: Lctrs) -> str:
    lines = _signature_lines(system.signature)
    lines.append("RULES")
    lines.extend(f"  {print_rule(rule)} ;" for rule in system.rules)
    return "\n".join(lines) + "\n"

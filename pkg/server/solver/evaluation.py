"""
Ground evaluation of theory terms under the fixed interpretation of the
core boolean and integer signature.
"""

from typing import Callable, Dict, Mapping, Union

from server.lctrs.errors import DivisionByZero, EvaluationError, NegativeExponent, NonGroundTerm
from server.lctrs.terms import Term, Var

Value = Union[int, bool]


def euclidean_div(a: int, b: int) -> int:
    """Integer division with a non-negative remainder (SMT-LIB semantics)."""
    if b == 0:
        raise DivisionByZero(f"{a} div 0")
    return a // b if b > 0 else -(a // -b)


def euclidean_mod(a: int, b: int) -> int:
    return a - b * euclidean_div(a, b)


def _power(a: int, b: int) -> int:
    if b < 0:
        raise NegativeExponent(f"{a} exp {b}")
    return a ** b


_BINARY: Dict[str, Callable[[Value, Value], Value]] = {
    "/\\": lambda a, b: a and b,
    "\\/": lambda a, b: a or b,
    "=>": lambda a, b: (not a) or b,
    "<=>": lambda a, b: a == b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "div": euclidean_div,
    "mod": euclidean_mod,
    "exp": _power,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
}


def _evaluate(t: Term, model: Mapping[Var, Value]) -> Value:
    if isinstance(t, Var):
        if t not in model:
            raise NonGroundTerm(f"variable {t} has no value")
        return model[t]
    symbol = t.symbol
    if symbol.is_value:
        return symbol.value
    if not symbol.is_theory:
        raise EvaluationError(f"{symbol.name} is not a theory symbol")
    args = [_evaluate(a, model) for a in t.args]
    if symbol.name == "not":
        return not args[0]
    if symbol.name == "-" and len(args) == 1:
        return -args[0]
    try:
        operation = _BINARY[symbol.name]
    except KeyError:
        raise EvaluationError(f"no interpretation for {symbol.name}") from None
    return operation(*args)


def eval_ground(t: Term) -> Value:
    """Interpret a ground theory term."""
    return _evaluate(t, {})


def eval_under(t: Term, model: Mapping[Var, Value]) -> Value:
    """Evaluate with variables read from the model."""
    return _evaluate(t, model)

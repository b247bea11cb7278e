"""
Sorted Terms, Signatures and Substitutions
==========================================

Core data model shared by every analysis module:
1. Sorts (the theory sorts ``int``/``bool`` plus user term sorts)
2. Function symbols classified as values, calculation symbols,
   constructors or defined symbols
3. Immutable terms, positions and substitutions
4. Structural predicates (linearity, pattern-hood, matching, height)
5. The freshness context used whenever new variables are invented
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from server.lctrs.errors import InfiniteComplement, InvalidPosition, LctrsError, SortMismatch

logger = logging.getLogger(__name__)


# ============================================================================
# SORTS AND SYMBOLS
# ============================================================================

class SortKind(Enum):
    THEORY = "theory"
    TERM = "term"


@dataclass(frozen=True)
class Sort:
    name: str
    kind: SortKind = SortKind.TERM

    @property
    def is_theory(self) -> bool:
        return self.kind is SortKind.THEORY

    def __str__(self) -> str:
        return self.name


INT = Sort("int", SortKind.THEORY)
BOOL = Sort("bool", SortKind.THEORY)
THEORY_SORTS: Dict[str, Sort] = {"int": INT, "bool": BOOL}


class SymbolKind(Enum):
    VALUE = "value"
    CALCULATION = "calculation"
    CONSTRUCTOR = "constructor"
    DEFINED = "defined"


@dataclass(frozen=True)
class FunctionSymbol:
    """A sorted function symbol; value symbols carry their interpretation."""
    name: str
    arg_sorts: Tuple[Sort, ...]
    result_sort: Sort
    kind: SymbolKind
    value: Union[int, bool, None] = None

    def __post_init__(self):
        if not isinstance(self.arg_sorts, tuple):
            object.__setattr__(self, "arg_sorts", tuple(self.arg_sorts))
        if self.kind is SymbolKind.VALUE and (self.arg_sorts or not self.result_sort.is_theory):
            raise SortMismatch(f"value symbol {self.name} must be a theory-sorted constant")
        if self.kind is SymbolKind.CALCULATION and not (
            self.result_sort.is_theory and all(s.is_theory for s in self.arg_sorts)
        ):
            raise SortMismatch(f"calculation symbol {self.name} must range over theory sorts")

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def is_value(self) -> bool:
        return self.kind is SymbolKind.VALUE

    @property
    def is_theory(self) -> bool:
        return self.kind in (SymbolKind.VALUE, SymbolKind.CALCULATION)

    @property
    def is_constructor_like(self) -> bool:
        """Constructors and values: the symbols allowed inside constructor terms."""
        return self.kind in (SymbolKind.CONSTRUCTOR, SymbolKind.VALUE)

    def __str__(self) -> str:
        return self.name


# ============================================================================
# TERMS
# ============================================================================

@dataclass(frozen=True, repr=False)
class Var:
    name: str
    sort: Sort

    def __str__(self) -> str:
        return self.name

    __repr__ = __str__


@dataclass(frozen=True, repr=False)
class App:
    symbol: FunctionSymbol
    args: Tuple["Term", ...] = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.symbol.arity:
            raise SortMismatch(
                f"{self.symbol.name} expects {self.symbol.arity} argument(s), got {len(self.args)}"
            )
        for index, (arg, expected) in enumerate(zip(self.args, self.symbol.arg_sorts), start=1):
            if arg.sort != expected:
                raise SortMismatch(
                    f"argument {index} of {self.symbol.name} has sort {arg.sort}, expected {expected}"
                )
        object.__setattr__(self, "_hash", hash((self.symbol, self.args)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def sort(self) -> Sort:
        return self.symbol.result_sort

    def __str__(self) -> str:
        return serialize(self)

    __repr__ = __str__


Term = Union[Var, App]
Position = Tuple[int, ...]


def serialize(t: Term) -> str:
    """Deterministic prefix serialization used for canonical ordering."""
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.symbol.name
    return f"{t.symbol.name}({','.join(serialize(a) for a in t.args)})"


def term_key(t: Term) -> str:
    return serialize(t)


# ============================================================================
# THEORY SYMBOLS
# ============================================================================

def _calc(name: str, arg_sorts: Sequence[Sort], result: Sort) -> FunctionSymbol:
    return FunctionSymbol(name, tuple(arg_sorts), result, SymbolKind.CALCULATION)


AND = _calc("/\\", (BOOL, BOOL), BOOL)
OR = _calc("\\/", (BOOL, BOOL), BOOL)
NOT = _calc("not", (BOOL,), BOOL)
IMPLIES = _calc("=>", (BOOL, BOOL), BOOL)
IFF = _calc("<=>", (BOOL, BOOL), BOOL)
EQ_INT = _calc("=", (INT, INT), BOOL)
EQ_BOOL = _calc("=", (BOOL, BOOL), BOOL)
NEQ_INT = _calc("!=", (INT, INT), BOOL)
NEQ_BOOL = _calc("!=", (BOOL, BOOL), BOOL)
PLUS = _calc("+", (INT, INT), INT)
MINUS = _calc("-", (INT, INT), INT)
NEG = _calc("-", (INT,), INT)
TIMES = _calc("*", (INT, INT), INT)
DIV = _calc("div", (INT, INT), INT)
MOD = _calc("mod", (INT, INT), INT)
EXP = _calc("exp", (INT, INT), INT)
GE = _calc(">=", (INT, INT), BOOL)
GT = _calc(">", (INT, INT), BOOL)
LE = _calc("<=", (INT, INT), BOOL)
LT = _calc("<", (INT, INT), BOOL)

CORE_SYMBOLS: Tuple[FunctionSymbol, ...] = (
    AND, OR, NOT, IMPLIES, IFF, EQ_INT, EQ_BOOL, NEQ_INT, NEQ_BOOL,
    PLUS, MINUS, NEG, TIMES, DIV, MOD, EXP, GE, GT, LE, LT,
)
THEORY_NAMES = frozenset(s.name for s in CORE_SYMBOLS) | {"true", "false"}


def theory_symbol(name: str, arg_sorts: Sequence[Sort]) -> Optional[FunctionSymbol]:
    arg_sorts = tuple(arg_sorts)
    for symbol in CORE_SYMBOLS:
        if symbol.name == name and symbol.arg_sorts == arg_sorts:
            return symbol
    return None


def int_value(n: int) -> App:
    return App(FunctionSymbol(str(n), (), INT, SymbolKind.VALUE, int(n)))


TRUE = App(FunctionSymbol("true", (), BOOL, SymbolKind.VALUE, True))
FALSE = App(FunctionSymbol("false", (), BOOL, SymbolKind.VALUE, False))


def bool_value(b: bool) -> App:
    return TRUE if b else FALSE


def theory_value(v: Union[int, bool]) -> App:
    if isinstance(v, bool):
        return bool_value(v)
    return int_value(v)


def is_value(t: Term) -> bool:
    return isinstance(t, App) and t.symbol.is_value


def value_of(t: Term) -> Union[int, bool]:
    if not is_value(t):
        raise LctrsError(f"{t} is not a value")
    return t.symbol.value


def mk_app(symbol: FunctionSymbol, *args: Term) -> App:
    return App(symbol, tuple(args))


def mk_and(a: Term, b: Term) -> App:
    return App(AND, (a, b))


def mk_or(a: Term, b: Term) -> App:
    return App(OR, (a, b))


def mk_not(a: Term) -> App:
    return App(NOT, (a,))


def mk_eq(a: Term, b: Term) -> App:
    return App(EQ_BOOL if a.sort == BOOL else EQ_INT, (a, b))


def conjunction(items: Sequence[Term]) -> Term:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    if not items:
        return TRUE
    result = items[0]
    for item in items[1:]:
        result = mk_and(result, item)
    return result


def disjunction(items: Sequence[Term]) -> Term:
    if not items:
        return FALSE
    result = items[0]
    for item in items[1:]:
        result = mk_or(result, item)
    return result


# ============================================================================
# SIGNATURE
# ============================================================================

@dataclass
class Signature:
    """
    Sorts and user symbols over the implicit core theory signature.

    ``int_values`` restricts the integer value family to a finite tuple;
    ``None`` means the usual infinite family of all integers.
    """
    sorts: Dict[str, Sort] = field(default_factory=dict)
    symbols: Dict[str, FunctionSymbol] = field(default_factory=dict)
    int_values: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        for name, sort in list(self.sorts.items()):
            if name in THEORY_SORTS and sort != THEORY_SORTS[name]:
                raise SortMismatch(f"theory sort {name} cannot be redeclared")
        self.sorts = {**THEORY_SORTS, **self.sorts}
        for name, symbol in self.symbols.items():
            if name in THEORY_NAMES:
                raise SortMismatch(f"{name} is a core theory symbol")
            if symbol.kind in (SymbolKind.VALUE, SymbolKind.CALCULATION):
                raise SortMismatch(f"user symbol {name} cannot be a theory symbol")
        if self.int_values is not None:
            self.int_values = tuple(sorted(set(self.int_values)))

    @classmethod
    def build(cls, sorts: Iterable[Sort], symbols: Iterable[FunctionSymbol],
              int_values: Optional[Iterable[int]] = None) -> "Signature":
        return cls(
            sorts={s.name: s for s in sorts},
            symbols={f.name: f for f in symbols},
            int_values=tuple(int_values) if int_values is not None else None,
        )

    @property
    def core_symbols(self) -> Tuple[FunctionSymbol, ...]:
        return CORE_SYMBOLS

    def sort(self, name: str) -> Sort:
        try:
            return self.sorts[name]
        except KeyError:
            raise LctrsError(f"unknown sort {name}") from None

    def symbol(self, name: str) -> Optional[FunctionSymbol]:
        return self.symbols.get(name)

    def resolve(self, name: str, arity: int) -> FunctionSymbol:
        symbol = self.symbols.get(name)
        if symbol is None or symbol.arity != arity:
            raise LctrsError(f"no symbol {name}/{arity} in the signature")
        return symbol

    def term_sorts(self) -> List[Sort]:
        return [s for s in self.sorts.values() if not s.is_theory]

    def values_of(self, sort: Sort) -> Optional[List[App]]:
        """The value constants of a sort, or ``None`` when there are infinitely many."""
        if sort == BOOL:
            return [FALSE, TRUE]
        if sort == INT:
            if self.int_values is None:
                return None
            return [int_value(n) for n in self.int_values]
        return []

    def constructors(self, sort: Sort) -> List[FunctionSymbol]:
        """Constructor-like symbols with the given result sort, in declaration order."""
        if sort.is_theory:
            values = self.values_of(sort)
            if values is None:
                raise InfiniteComplement(f"sort {sort} has infinitely many values")
            return [v.symbol for v in values]
        return [
            f for f in self.symbols.values()
            if f.kind is SymbolKind.CONSTRUCTOR and f.result_sort == sort
        ]

    def defined_symbols(self) -> List[FunctionSymbol]:
        return [f for f in self.symbols.values() if f.kind is SymbolKind.DEFINED]

    def allows_value(self, t: Term) -> bool:
        if self.int_values is None or not is_value(t) or t.sort != INT:
            return True
        return value_of(t) in self.int_values


# ============================================================================
# STRUCTURE
# ============================================================================

def height(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max((height(a) for a in t.args), default=0)


def iter_subterms(t: Term, position: Position = ()) -> Iterator[Tuple[Position, Term]]:
    """Pre-order walk yielding (position, subterm) pairs."""
    yield position, t
    if isinstance(t, App):
        for index, arg in enumerate(t.args, start=1):
            yield from iter_subterms(arg, position + (index,))


def positions(t: Term) -> List[Position]:
    return [p for p, _ in iter_subterms(t)]


def var_occurrences(t: Term) -> List[Var]:
    return [s for _, s in iter_subterms(t) if isinstance(s, Var)]


def variables(*terms: Term) -> List[Var]:
    """Variables in order of first occurrence, without repetition."""
    seen: Dict[Var, None] = {}
    for t in terms:
        for v in var_occurrences(t):
            seen.setdefault(v, None)
    return list(seen)


def is_ground(t: Term) -> bool:
    return not var_occurrences(t)


def subterm_at(t: Term, p: Position) -> Term:
    current = t
    for depth, index in enumerate(p):
        if not isinstance(current, App) or not 1 <= index <= len(current.args):
            raise InvalidPosition(f"position {list(p)} leaves {t} at depth {depth}")
        current = current.args[index - 1]
    return current


def replace_at(t: Term, p: Position, s: Term) -> Term:
    target = subterm_at(t, p)
    if target.sort != s.sort:
        raise SortMismatch(f"cannot put {s} of sort {s.sort} at a position of sort {target.sort}")
    if not p:
        return s
    index = p[0]
    args = list(t.args)
    args[index - 1] = replace_at(args[index - 1], p[1:], s)
    return App(t.symbol, tuple(args))


def is_linear(t: Term) -> bool:
    occurrences = var_occurrences(t)
    return len(occurrences) == len(set(occurrences))


def is_linear_wrt(t: Term, xs: Iterable[Var]) -> bool:
    restricted = set(xs)
    occurrences = [v for v in var_occurrences(t) if v in restricted]
    return len(occurrences) == len(set(occurrences))


def is_value_free(t: Term) -> bool:
    return not any(is_value(s) for _, s in iter_subterms(t))


def value_positions(t: Term) -> List[Position]:
    return [p for p, s in iter_subterms(t) if is_value(s)]


def is_theory_term(t: Term) -> bool:
    for _, s in iter_subterms(t):
        if isinstance(s, Var):
            if not s.sort.is_theory:
                return False
        elif not s.symbol.is_theory:
            return False
    return True


def is_constructor_term(t: Term) -> bool:
    return all(isinstance(s, Var) or s.symbol.is_constructor_like for _, s in iter_subterms(t))


def is_pattern(t: Term, sig: Optional[Signature] = None) -> bool:
    """f(t1..tn) with f defined and every ti a constructor term."""
    if not isinstance(t, App) or t.symbol.kind is not SymbolKind.DEFINED:
        return False
    if sig is not None and sig.symbols.get(t.symbol.name) != t.symbol:
        return False
    return all(is_constructor_term(a) for a in t.args)


# ============================================================================
# SUBSTITUTIONS
# ============================================================================

class Substitution(Mapping[Var, Term]):
    """Finite sort-preserving map; identity bindings are never stored."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Optional[Union[Mapping[Var, Term], Iterable[Tuple[Var, Term]]]] = None):
        items = bindings.items() if isinstance(bindings, Mapping) else (bindings or ())
        stored: Dict[Var, Term] = {}
        for var, image in items:
            if var.sort != image.sort:
                raise SortMismatch(f"cannot bind {var}:{var.sort} to {image}:{image.sort}")
            if image != var:
                stored[var] = image
        self._bindings = stored

    def __getitem__(self, var: Var) -> Term:
        return self._bindings[var]

    def __iter__(self) -> Iterator[Var]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v} -> {t}" for v, t in self._bindings.items())
        return "{" + inner + "}"

    def image(self, var: Var) -> Term:
        return self._bindings.get(var, var)

    def apply(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self._bindings.get(t, t)
        if not self._bindings or not t.args:
            return t
        return App(t.symbol, tuple(self.apply(a) for a in t.args))

    def restrict(self, xs: Iterable[Var]) -> "Substitution":
        keep = set(xs)
        return Substitution({v: t for v, t in self._bindings.items() if v in keep})

    def is_renaming(self) -> bool:
        images = list(self._bindings.values())
        return all(isinstance(t, Var) for t in images) and len(images) == len(set(images))

    def range_variables(self) -> List[Var]:
        return variables(*self._bindings.values())


def apply_subst(t: Term, sigma: Substitution) -> Term:
    return sigma.apply(t)


def more_general(s: Term, t: Term) -> Optional[Substitution]:
    """One-sided matching: the substitution σ with sσ = t, if any."""
    bindings: Dict[Var, Term] = {}
    stack: List[Tuple[Term, Term]] = [(s, t)]
    while stack:
        pattern, target = stack.pop()
        if pattern.sort != target.sort:
            return None
        if isinstance(pattern, Var):
            bound = bindings.get(pattern)
            if bound is None:
                bindings[pattern] = target
            elif bound != target:
                return None
            continue
        if not isinstance(target, App) or target.symbol != pattern.symbol:
            return None
        stack.extend(zip(pattern.args, target.args))
    return Substitution(bindings)


def is_variant(s: Term, t: Term) -> bool:
    """True when s and t are equal up to a bijective renaming of variables."""
    sigma = more_general(s, t)
    if sigma is None:
        return False
    images = [sigma.image(v) for v in variables(s)]
    return all(isinstance(x, Var) for x in images) and len(images) == len(set(images))


def strictly_more_general(s: Term, t: Term) -> bool:
    return more_general(s, t) is not None and not is_variant(s, t)


def is_linearity_preserving(sigma: Substitution, xs: Iterable[Var]) -> bool:
    seen: Set[Var] = set()
    for x in dict.fromkeys(xs):
        image = sigma.image(x)
        if not is_linear(image):
            return False
        image_vars = set(var_occurrences(image))
        if image_vars & seen:
            return False
        seen |= image_vars
    return True


# ============================================================================
# FRESH VARIABLES
# ============================================================================

class FreshVariables:
    """
    Monotone supply of variables.

    Issued names have the shape ``hint#n``; since ``#`` never occurs in
    parsed identifiers, only previously issued or explicitly reserved names
    can collide, and those are skipped.
    """

    def __init__(self, reserved: Iterable[str] = ()):
        self._counter = itertools.count(1)
        self._used: Set[str] = set(reserved)

    def reserve(self, *terms: Term) -> None:
        for t in terms:
            for v in var_occurrences(t):
                self._used.add(v.name)

    def reserve_names(self, names: Iterable[str]) -> None:
        self._used.update(names)

    def fresh(self, sort: Sort, hint: str = "x") -> Var:
        base = hint.split("#", 1)[0] or "x"
        while True:
            name = f"{base}#{next(self._counter)}"
            if name not in self._used:
                self._used.add(name)
                return Var(name, sort)


def fresh_var(sort: Sort, hint: str, fresh: FreshVariables) -> Var:
    return fresh.fresh(sort, hint)


def base_name(v: Var) -> str:
    return v.name.split("#", 1)[0]

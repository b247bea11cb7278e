"""
LCTRS Text Format Parser
========================

Files consist of sections (``SORTS``, ``SIGNATURE``, ``INTS``, ``RULES``,
``PATTERNS``) holding ``;``-terminated items; ``#`` starts a comment::

    SORTS list ;
    SIGNATURE
      nil  : list ;
      cons : int * list => list ;
      f    : list * int => int ;
    RULES
      f(nil, y) -> 0 [ y <= 0 ] ;

Parsing runs in two phases. The first builds an untyped syntax tree for
every item, recovering at the next ``;`` after a syntax error. The second
classifies symbols (roots of rule left-hand sides and of patterns are
defined, every other declared symbol is a constructor), infers variable
sorts from their positions and builds sorted terms. All problems are
collected and raised together as one ``ParseError``.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from server.lctrs.constrained import ConstrainedTerm
from server.lctrs.errors import Diagnostic, LctrsError, ParseError, Severity, SourceSpan
from server.lctrs.quasi_reducibility import Lctrs, Rule
from server.lctrs.terms import (
    BOOL, FALSE, INT, THEORY_NAMES, THEORY_SORTS, TRUE, App, FunctionSymbol, Signature, Sort,
    SymbolKind, Term, Var, int_value, theory_symbol,
)
from server.lctrs_io.lexer import EOF, IDENT, INT as INT_TOKEN, Token, tokenize

logger = logging.getLogger(__name__)

SECTIONS = ("SORTS", "SIGNATURE", "INTS", "RULES", "PATTERNS")

_BOOLEAN_OPS = {"not", "/\\", "\\/", "=>", "<=>"}
_COMPARISONS = {"<=", "<", ">=", ">"}
_ARITHMETIC = {"+", "-", "*", "div", "mod", "exp"}
_EQUALITIES = {"=", "!="}


def _join(start: SourceSpan, end: SourceSpan) -> SourceSpan:
    return SourceSpan(start.start_line, start.start_column, end.end_line, end.end_column,
                      start.start_offset, end.end_offset)


def _error(code: str, message: str, span: Optional[SourceSpan]) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span)


# ============================================================================
# SYNTAX TREE
# ============================================================================

@dataclass(frozen=True)
class Node:
    kind: str                       # "call", "op", "int" or "bool"
    name: str
    args: Tuple["Node", ...]
    span: SourceSpan
    called: bool = False            # identifier written with an argument list

    @property
    def value(self) -> int:
        return int(self.name)


@dataclass
class Declaration:
    name: str
    arg_sorts: List[str]
    result_sort: str
    span: SourceSpan


@dataclass
class RuleItem:
    lhs: Node
    rhs: Node
    guard: Optional[Node]
    span: SourceSpan


@dataclass
class PatternItem:
    term: Node
    constraint: Optional[Node]
    span: SourceSpan


@dataclass
class Document:
    sorts: List[Tuple[str, SourceSpan]] = field(default_factory=list)
    declarations: List[Declaration] = field(default_factory=list)
    int_ranges: List[Tuple[int, int, SourceSpan]] = field(default_factory=list)
    rules: List[RuleItem] = field(default_factory=list)
    patterns: List[PatternItem] = field(default_factory=list)


class _ItemError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class _Reader:
    """Recursive-descent reader over the token list."""

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token access -------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != EOF:
            self.pos += 1
        return token

    def previous(self) -> Token:
        return self.tokens[max(self.pos - 1, 0)]

    def expect_op(self, text: str) -> Token:
        token = self.peek()
        if not token.is_op(text):
            raise _ItemError(_error("syntax", f"expected '{text}', found '{token}'", token.span))
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        token = self.peek()
        if token.kind != IDENT:
            raise _ItemError(_error("syntax", f"expected {what}, found '{token}'", token.span))
        return self.advance()

    def recover(self) -> None:
        """Skip to just after the next ';' (or to a section keyword)."""
        while True:
            token = self.peek()
            if token.kind == EOF or token.is_word(*SECTIONS):
                return
            self.advance()
            if token.is_op(";"):
                return

    # -- expressions --------------------------------------------------------

    def expression(self) -> Node:
        left = self.disjunction()
        token = self.peek()
        if token.is_op("=>", "<=>"):
            self.advance()
            right = self.expression()
            return Node("op", token.text, (left, right), _join(left.span, right.span))
        return left

    def _left_assoc(self, operand, operators) -> Node:
        left = operand()
        while True:
            token = self.peek()
            if not (token.is_op(*operators) or token.is_word(*operators)):
                return left
            self.advance()
            right = operand()
            left = Node("op", token.text, (left, right), _join(left.span, right.span))

    def disjunction(self) -> Node:
        return self._left_assoc(self.conjunction, ("\\/",))

    def conjunction(self) -> Node:
        return self._left_assoc(self.negation, ("/\\",))

    def negation(self) -> Node:
        token = self.peek()
        if token.is_word("not"):
            self.advance()
            operand = self.negation()
            return Node("op", "not", (operand,), _join(token.span, operand.span))
        return self.comparison()

    def comparison(self) -> Node:
        left = self.additive()
        token = self.peek()
        if token.is_op(*(_COMPARISONS | _EQUALITIES)):
            self.advance()
            right = self.additive()
            return Node("op", token.text, (left, right), _join(left.span, right.span))
        return left

    def additive(self) -> Node:
        return self._left_assoc(self.multiplicative, ("+", "-"))

    def multiplicative(self) -> Node:
        return self._left_assoc(self.unary, ("*", "div", "mod", "exp"))

    def unary(self) -> Node:
        token = self.peek()
        if token.is_op("-"):
            self.advance()
            operand = self.unary()
            return Node("op", "-", (operand,), _join(token.span, operand.span))
        return self.atom()

    def atom(self) -> Node:
        token = self.peek()
        if token.kind == INT_TOKEN:
            self.advance()
            return Node("int", token.text, (), token.span)
        if token.is_word("true", "false"):
            self.advance()
            return Node("bool", token.text, (), token.span)
        if token.is_op("("):
            self.advance()
            inner = self.expression()
            self.expect_op(")")
            return inner
        if token.kind == IDENT and token.text not in ("not", "div", "mod", "exp"):
            self.advance()
            if not self.peek().is_op("("):
                return Node("call", token.text, (), token.span)
            self.advance()
            args: List[Node] = []
            if not self.peek().is_op(")"):
                args.append(self.expression())
                while self.peek().is_op(","):
                    self.advance()
                    args.append(self.expression())
            close = self.expect_op(")")
            return Node("call", token.text, tuple(args), _join(token.span, close.span), called=True)
        raise _ItemError(_error("syntax", f"unexpected '{token}'", token.span))

    def optional_guard(self) -> Optional[Node]:
        if not self.peek().is_op("["):
            return None
        self.advance()
        guard = self.expression()
        self.expect_op("]")
        return guard

    # -- items --------------------------------------------------------------

    def sort_names(self, document: Document) -> None:
        while not self.peek().is_op(";"):
            token = self.expect_ident("a sort name")
            document.sorts.append((token.text, token.span))
            if self.peek().is_op(","):
                self.advance()
        self.expect_op(";")

    def declaration(self, document: Document) -> None:
        name = self.expect_ident("a symbol name")
        self.expect_op(":")
        sorts = [self.expect_ident("a sort name").text]
        while self.peek().is_op("*"):
            self.advance()
            sorts.append(self.expect_ident("a sort name").text)
        if self.peek().is_op("=>"):
            self.advance()
            result = self.expect_ident("a result sort").text
            arg_sorts = sorts
        elif len(sorts) == 1:
            result, arg_sorts = sorts[0], []
        else:
            raise _ItemError(_error("syntax", "expected '=>' and a result sort", self.peek().span))
        end = self.expect_op(";")
        document.declarations.append(Declaration(name.text, arg_sorts, result, _join(name.span, end.span)))

    def signed_int(self, what: str) -> Tuple[int, SourceSpan]:
        # after a section keyword the lexer reads "-" as an operator
        token = self.peek()
        sign = 1
        if token.is_op("-"):
            self.advance()
            sign = -1
        number = self.peek()
        if number.kind != INT_TOKEN:
            raise _ItemError(_error("syntax", f"expected {what}", number.span))
        self.advance()
        return sign * number.value, _join(token.span, number.span)

    def int_range(self, document: Document) -> None:
        low, start = self.signed_int("an integer range a .. b")
        self.expect_op("..")
        high, _ = self.signed_int("an integer upper bound")
        end = self.expect_op(";")
        document.int_ranges.append((low, high, _join(start, end.span)))

    def rule(self, document: Document) -> None:
        lhs = self.expression()
        self.expect_op("->")
        rhs = self.expression()
        guard = self.optional_guard()
        end = self.expect_op(";")
        document.rules.append(RuleItem(lhs, rhs, guard, _join(lhs.span, end.span)))

    def pattern(self, document: Document) -> None:
        term = self.expression()
        constraint = self.optional_guard()
        end = self.expect_op(";")
        document.patterns.append(PatternItem(term, constraint, _join(term.span, end.span)))

    def document(self, diagnostics: List[Diagnostic]) -> Document:
        document = Document()
        handlers = {
            "SORTS": self.sort_names,
            "SIGNATURE": self.declaration,
            "INTS": self.int_range,
            "RULES": self.rule,
            "PATTERNS": self.pattern,
        }
        section: Optional[str] = None
        while self.peek().kind != EOF:
            token = self.peek()
            if token.is_word(*SECTIONS):
                section = self.advance().text
                continue
            try:
                if section is None:
                    raise _ItemError(_error("syntax", f"expected a section keyword, found '{token}'", token.span))
                handlers[section](document)
            except _ItemError as exc:
                diagnostics.append(exc.diagnostic)
                self.recover()
        return document


def read_document(text: str) -> Tuple[Document, List[Diagnostic]]:
    tokens, diagnostics = tokenize(text)
    document = _Reader(tokens).document(diagnostics)
    return document, diagnostics


# ============================================================================
# SIGNATURE
# ============================================================================

def _root_name(node: Node) -> Optional[str]:
    return node.name if node.kind == "call" else None


def build_signature(documents: Sequence[Document], diagnostics: List[Diagnostic],
                    base: Optional[Signature] = None) -> Signature:
    sorts: Dict[str, Sort] = dict(base.sorts) if base else dict(THEORY_SORTS)
    for document in documents:
        for name, span in document.sorts:
            if name in sorts:
                diagnostics.append(_error("duplicate", f"sort {name} is already declared", span))
            else:
                sorts[name] = Sort(name)

    defined = set()
    for document in documents:
        defined.update(filter(None, (_root_name(r.lhs) for r in document.rules)))
        defined.update(filter(None, (_root_name(p.term) for p in document.patterns)))

    symbols: Dict[str, FunctionSymbol] = dict(base.symbols) if base else {}
    if base is not None:
        for name in defined:
            symbol = symbols.get(name)
            if symbol is not None and symbol.kind is SymbolKind.CONSTRUCTOR:
                symbols[name] = FunctionSymbol(symbol.name, symbol.arg_sorts, symbol.result_sort, SymbolKind.DEFINED)

    def resolve(sort_name: str, span: SourceSpan) -> Optional[Sort]:
        sort = sorts.get(sort_name)
        if sort is None:
            diagnostics.append(_error("unknown-sort", f"unknown sort {sort_name}", span))
        return sort

    for document in documents:
        for decl in document.declarations:
            if decl.name in THEORY_NAMES or decl.name in SECTIONS:
                diagnostics.append(_error("reserved", f"{decl.name} is a reserved name", decl.span))
                continue
            if decl.name in symbols:
                diagnostics.append(_error("duplicate", f"symbol {decl.name} is already declared", decl.span))
                continue
            arg_sorts = [resolve(s, decl.span) for s in decl.arg_sorts]
            result = resolve(decl.result_sort, decl.span)
            if result is None or any(s is None for s in arg_sorts):
                continue
            kind = SymbolKind.DEFINED if decl.name in defined else SymbolKind.CONSTRUCTOR
            symbols[decl.name] = FunctionSymbol(decl.name, tuple(arg_sorts), result, kind)

    int_values = base.int_values if base else None
    ranges = [r for document in documents for r in document.int_ranges]
    for low, high, span in ranges[1:]:
        diagnostics.append(_error("duplicate", "only one INTS range may be given", span))
    if ranges:
        low, high, span = ranges[0]
        if low > high:
            diagnostics.append(_error("syntax", f"empty integer range {low} .. {high}", span))
        else:
            int_values = tuple(range(low, high + 1))

    user_sorts = [s for name, s in sorts.items() if name not in THEORY_SORTS]
    return Signature.build(user_sorts, symbols.values(), int_values)


# ============================================================================
# ELABORATION
# ============================================================================

class _Elaborator:
    """Infers variable sorts for one item and builds its terms."""

    def __init__(self, signature: Signature, diagnostics: List[Diagnostic],
                 var_sorts: Optional[Dict[str, Sort]] = None):
        self.signature = signature
        self.diagnostics = diagnostics
        self.var_sorts: Dict[str, Sort] = dict(var_sorts or {})
        self.report = False
        self.failed = False

    def _fail(self, code: str, message: str, span: SourceSpan) -> None:
        if self.report:
            self.diagnostics.append(_error(code, message, span))
            self.failed = True

    def _check(self, actual: Optional[Sort], expected: Optional[Sort], node: Node) -> Optional[Sort]:
        if actual is not None and expected is not None and actual != expected:
            self._fail("sort-mismatch", f"expected sort {expected}, found {actual}", node.span)
        return actual

    def _record(self, node: Node, expected: Optional[Sort]) -> Optional[Sort]:
        known = self.var_sorts.get(node.name)
        if expected is None:
            return known
        if known is None:
            self.var_sorts[node.name] = expected
            return expected
        if known != expected:
            self._fail("sort-mismatch", f"variable {node.name} is used at sorts {known} and {expected}", node.span)
        return known

    def collect(self, node: Node, expected: Optional[Sort]) -> Optional[Sort]:
        if node.kind == "int":
            return self._check(INT, expected, node)
        if node.kind == "bool":
            return self._check(BOOL, expected, node)
        if node.kind == "call":
            symbol = self.signature.symbols.get(node.name)
            if symbol is None:
                if node.called:
                    self._fail("unknown-symbol", f"unknown function symbol {node.name}", node.span)
                    return None
                return self._record(node, expected)
            if symbol.arity != len(node.args):
                self._fail("sort-mismatch",
                           f"{node.name} expects {symbol.arity} argument(s), got {len(node.args)}", node.span)
                return symbol.result_sort
            for arg, sort in zip(node.args, symbol.arg_sorts):
                self.collect(arg, sort)
            return self._check(symbol.result_sort, expected, node)
        name = node.name
        if name in _BOOLEAN_OPS:
            for arg in node.args:
                self.collect(arg, BOOL)
            return self._check(BOOL, expected, node)
        if name in _COMPARISONS:
            for arg in node.args:
                self.collect(arg, INT)
            return self._check(BOOL, expected, node)
        if name in _ARITHMETIC:
            for arg in node.args:
                self.collect(arg, INT)
            return self._check(INT, expected, node)
        left, right = node.args
        left_sort = self.collect(left, None)
        right_sort = self.collect(right, left_sort)
        if left_sort is None and right_sort is not None and left.kind == "call" and not left.called:
            self.collect(left, right_sort)
        return self._check(BOOL, expected, node)

    def build(self, node: Node) -> Term:
        if node.kind == "int":
            return int_value(node.value)
        if node.kind == "bool":
            return TRUE if node.name == "true" else FALSE
        args = tuple(self.build(a) for a in node.args)
        if node.kind == "call":
            symbol = self.signature.symbols.get(node.name)
            if symbol is None:
                return Var(node.name, self.var_sorts.get(node.name, INT))
            return App(symbol, args)
        symbol = theory_symbol(node.name, [a.sort for a in args])
        if symbol is None:
            raise _ItemError(_error("sort-mismatch", f"operator {node.name} does not apply to these arguments", node.span))
        return App(symbol, args)

    def elaborate(self, items: Sequence[Tuple[Node, Optional[Sort]]]) -> Optional[List[Term]]:
        for final in (False, False, True):
            self.report = final
            for node, expected in items:
                self.collect(node, expected)
        if self.failed:
            return None
        try:
            return [self.build(node) for node, _ in items]
        except _ItemError as exc:
            self.diagnostics.append(exc.diagnostic)
        except LctrsError as exc:
            self.diagnostics.append(_error("sort-mismatch", str(exc), items[0][0].span))
        return None


def _rule(item: RuleItem, signature: Signature, diagnostics: List[Diagnostic]) -> Optional[Rule]:
    elaborator = _Elaborator(signature, diagnostics)
    lhs_sort = elaborator.collect(item.lhs, None)
    parts = [(item.lhs, None), (item.rhs, lhs_sort)]
    if item.guard is not None:
        parts.append((item.guard, BOOL))
    terms = elaborator.elaborate(parts)
    if terms is None:
        return None
    guard = terms[2] if item.guard is not None else TRUE
    try:
        return Rule(terms[0], terms[1], guard, span=item.span)
    except LctrsError as exc:
        diagnostics.append(_error("sort-mismatch", str(exc), item.span))
        return None


def _pattern(item: PatternItem, signature: Signature, diagnostics: List[Diagnostic]) -> Optional[ConstrainedTerm]:
    parts = [(item.term, None)]
    if item.constraint is not None:
        parts.append((item.constraint, BOOL))
    terms = _Elaborator(signature, diagnostics).elaborate(parts)
    if terms is None:
        return None
    try:
        return ConstrainedTerm(terms[0], terms[1] if len(terms) > 1 else TRUE)
    except LctrsError as exc:
        diagnostics.append(_error("sort-mismatch", str(exc), item.span))
        return None


def _raise_on_errors(diagnostics: List[Diagnostic]) -> None:
    if any(d.is_error for d in diagnostics):
        raise ParseError(diagnostics)


# ============================================================================
# ENTRY POINTS
# ============================================================================

def parse_lctrs(text: str) -> Lctrs:
    document, diagnostics = read_document(text)
    signature = build_signature([document], diagnostics)
    rules = [_rule(item, signature, diagnostics) for item in document.rules]
    _raise_on_errors(diagnostics)
    logger.debug("parsed %d rule(s) over %d symbol(s)", len(rules), len(signature.symbols))
    return Lctrs(signature, [r for r in rules if r is not None])


def parse_patterns(signature_text: Optional[str],
                   pattern_texts: Sequence[str]) -> Tuple[Signature, List[List[ConstrainedTerm]]]:
    """One shared signature for several pattern files; pattern roots become defined symbols."""
    diagnostics: List[Diagnostic] = []
    documents = []
    for text in ([signature_text] if signature_text is not None else []) + list(pattern_texts):
        document, found = read_document(text)
        documents.append(document)
        diagnostics.extend(found)
    signature = build_signature(documents, diagnostics)
    offset = 1 if signature_text is not None else 0
    groups = [
        [_pattern(item, signature, diagnostics) for item in document.patterns]
        for document in documents[offset:]
    ]
    _raise_on_errors(diagnostics)
    return signature, [[p for p in group if p is not None] for group in groups]


def _single_expression(text: str, signature: Signature, var_sorts: Optional[Dict[str, Sort]],
                       expected: Optional[Sort]) -> Term:
    tokens, diagnostics = tokenize(text)
    reader = _Reader(tokens)
    node = None
    try:
        node = reader.expression()
        if reader.peek().kind != EOF:
            raise _ItemError(_error("syntax", f"unexpected '{reader.peek()}'", reader.peek().span))
    except _ItemError as exc:
        diagnostics.append(exc.diagnostic)
    terms = None
    if node is not None and not diagnostics:
        terms = _Elaborator(signature, diagnostics, var_sorts).elaborate([(node, expected)])
    _raise_on_errors(diagnostics)
    return terms[0]


def parse_term(text: str, signature: Optional[Signature] = None,
               var_sorts: Optional[Dict[str, Sort]] = None) -> Term:
    return _single_expression(text, signature or Signature(), var_sorts, None)


def parse_constraint(text: str, var_sorts: Optional[Dict[str, Sort]] = None,
                     signature: Optional[Signature] = None) -> Term:
    return _single_expression(text, signature or Signature(), var_sorts, BOOL)

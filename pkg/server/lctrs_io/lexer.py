"""Tokenizer for the LCTRS text format."""

import re
from dataclasses import dataclass
from typing import List, Tuple

from server.lctrs.errors import Diagnostic, Severity, SourceSpan

IDENT = "ident"
INT = "int"
OP = "op"
EOF = "eof"

KEYWORD_OPERATORS = {"not", "div", "mod", "exp"}

# longest operators first
_OPERATORS = [
    "<=>", "/\\", "\\/", "=>", "->", "!=", "<=", ">=", "..",
    "<", ">", "=", "+", "-", "*", "(", ")", "[", "]", ",", ";", ":",
]

_TOKEN = re.compile(
    r"(?P<space>[ \t\r]+)"
    r"|(?P<newline>\n)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<int>\d+)"
    r"|(?P<op>" + "|".join(re.escape(op) for op in _OPERATORS) + r")"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan

    @property
    def value(self) -> int:
        return int(self.text)

    def is_op(self, *texts: str) -> bool:
        return self.kind == OP and self.text in texts

    def is_word(self, *texts: str) -> bool:
        return self.kind == IDENT and self.text in texts

    def __str__(self) -> str:
        return self.text if self.kind != EOF else "end of input"


def _is_operand(token: Token) -> bool:
    if token.kind == INT:
        return True
    if token.kind == IDENT:
        return token.text not in KEYWORD_OPERATORS
    return token.is_op(")", "]")


class _Cursor:
    """Tracks line, column and byte offset while scanning."""

    def __init__(self, text: str):
        self.text = text
        self.index = 0
        self.line = 1
        self.column = 1
        self.offset = 0

    def mark(self) -> Tuple[int, int, int]:
        return self.line, self.column, self.offset

    def advance(self, count: int) -> None:
        for ch in self.text[self.index:self.index + count]:
            self.offset += len(ch.encode("utf-8"))
            if ch == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
        self.index += count


def _span(start: Tuple[int, int, int], end: Tuple[int, int, int]) -> SourceSpan:
    return SourceSpan(start[0], start[1], end[0], end[1], start[2], end[2])


def tokenize(text: str) -> Tuple[List[Token], List[Diagnostic]]:
    """Tokens (ending in EOF) plus diagnostics for unreadable characters."""
    tokens: List[Token] = []
    diagnostics: List[Diagnostic] = []
    cursor = _Cursor(text)
    while cursor.index < len(text):
        start = cursor.mark()
        match = _TOKEN.match(text, cursor.index)
        if match is None:
            bad = text[cursor.index]
            cursor.advance(1)
            diagnostics.append(Diagnostic(
                Severity.ERROR, "syntax", f"unexpected character {bad!r}",
                _span(start, cursor.mark()),
            ))
            continue
        kind = match.lastgroup
        lexeme = match.group()
        # "-" directly followed by digits is a negative literal unless it follows an operand
        if kind == "op" and lexeme == "-" and (not tokens or not _is_operand(tokens[-1])):
            digits = re.match(r"\d+", text[match.end():])
            if digits:
                lexeme = "-" + digits.group()
                kind = "int"
        cursor.advance(len(lexeme))
        if kind in ("space", "newline", "comment"):
            continue
        tokens.append(Token(kind, lexeme, _span(start, cursor.mark())))
    end = cursor.mark()
    tokens.append(Token(EOF, "", _span(end, end)))
    return tokens, diagnostics
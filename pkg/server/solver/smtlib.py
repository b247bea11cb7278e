"""
SMT-LIB v2 Bridge
=================

Translation of constraints into SMT-LIB scripts, a small s-expression
reader for solver responses, and a long-lived solver process driven over
stdin/stdout. Each query runs after ``(reset)`` and is bounded by a
wall-clock timeout; a timed-out process is killed and restarted lazily.
"""

import logging
import queue
import re
import shlex
import shutil
import subprocess
import threading
import time
from typing import Dict, List, Mapping, Optional, Sequence, Union

from server.lctrs.errors import (
    EvaluationError, SolverProtocolError, SolverUnavailable, UnsupportedSymbol,
)
from server.lctrs.terms import (
    AND, BOOL, DIV, EQ_BOOL, EQ_INT, EXP, FALSE, GE, GT, IFF, IMPLIES, INT, LE, LT,
    MINUS, MOD, NEG, NEQ_BOOL, NEQ_INT, NOT, OR, PLUS, TIMES, TRUE, App, Term, Var,
    int_value, iter_subterms, mk_app, variables,
)
from server.solver.evaluation import eval_ground, eval_under
from server.solver.results import EquivVerdict, SatResult

logger = logging.getLogger(__name__)

SExpr = Union[str, List["SExpr"]]

_SIMPLE_SYMBOL = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*$")
_RESERVED = {"and", "or", "not", "true", "false", "exists", "forall", "let", "distinct", "div", "mod"}

_OPERATORS = {
    AND: "and", OR: "or", NOT: "not", IMPLIES: "=>", IFF: "=", EQ_BOOL: "=", EQ_INT: "=",
    NEQ_INT: "distinct", NEQ_BOOL: "distinct", PLUS: "+", MINUS: "-", NEG: "-",
    TIMES: "*", DIV: "div", MOD: "mod", GE: ">=", GT: ">", LE: "<=", LT: "<",
}


# ============================================================================
# TERM -> SMT-LIB
# ============================================================================

def quote(name: str) -> str:
    """Symbols outside the simple-symbol grammar (``x#3``) are written ``|x#3|``."""
    if _SIMPLE_SYMBOL.match(name) and name not in _RESERVED:
        return name
    return f"|{name}|"


def _sort_name(v: Var) -> str:
    if v.sort == INT:
        return "Int"
    if v.sort == BOOL:
        return "Bool"
    raise UnsupportedSymbol(f"variable {v} has non-theory sort {v.sort}")


def smt_expr(t: Term) -> str:
    if isinstance(t, Var):
        _sort_name(t)
        return quote(t.name)
    symbol = t.symbol
    if symbol.is_value:
        if t.sort == BOOL:
            return "true" if symbol.value else "false"
        return str(symbol.value) if symbol.value >= 0 else f"(- {-symbol.value})"
    if symbol == EXP:
        raise UnsupportedSymbol("exp has no SMT-LIB counterpart")
    operator = _OPERATORS.get(symbol)
    if operator is None:
        raise UnsupportedSymbol(f"{symbol.name} is not a theory symbol")
    return f"({operator} {' '.join(smt_expr(a) for a in t.args)})"


def needs_nonlinear(phi: Term) -> bool:
    for _, s in iter_subterms(phi):
        if isinstance(s, App) and s.args:
            if s.symbol == TIMES and not any(a.symbol.is_value for a in s.args if isinstance(a, App)):
                return True
            if s.symbol in (DIV, MOD) and not (isinstance(s.args[1], App) and s.args[1].symbol.is_value):
                return True
    return False


def _declarations(free: Sequence[Var]) -> List[str]:
    return [f"(declare-const {quote(v.name)} {_sort_name(v)})" for v in free]


def sat_script(phi: Term, logic: Optional[str] = None) -> List[str]:
    if logic is None:
        logic = "QF_NIA" if needs_nonlinear(phi) else "QF_LIA"
    return [f"(set-logic {logic})", *_declarations(variables(phi)), f"(assert {smt_expr(phi)})"]


def to_smtlib(phi: Term, logic: str = "QF_LIA") -> str:
    """A standalone script: declarations, one assert, check-sat and get-model."""
    return "\n".join(sat_script(phi, logic) + ["(check-sat)", "(get-model)"]) + "\n"


def _exists(phi: Term, bound: Sequence[Var]) -> str:
    bound = [v for v in bound if v in set(variables(phi))]
    body = smt_expr(phi)
    if not bound:
        return body
    binders = " ".join(f"({quote(v.name)} {_sort_name(v)})" for v in bound)
    return f"(exists ({binders}) {body})"


def equiv_script(phi: Term, psi: Term, exist_phi: Sequence[Var], exist_psi: Sequence[Var]) -> List[str]:
    """Asserts the negated equivalence; Unsat means the two are equivalent."""
    hidden = set(exist_phi) | set(exist_psi)
    free = [v for v in variables(phi, psi) if v not in hidden]
    nonlinear = needs_nonlinear(phi) or needs_nonlinear(psi)
    logic = "NIA" if nonlinear else "LIA"
    return [
        f"(set-logic {logic})",
        *_declarations(free),
        f"(assert (not (= {_exists(phi, exist_phi)} {_exists(psi, exist_psi)})))",
    ]


# ============================================================================
# S-EXPRESSIONS
# ============================================================================

_TOKEN = re.compile(r'\s*(?:(\()|(\))|(\|[^|]*\|)|("(?:[^"]|"")*")|([^\s()|";]+)|(;[^\n]*))')


def tokenize(text: str) -> List[str]:
    tokens = []
    position = 0
    text = text.rstrip()
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None or match.end() == position:
            raise SolverProtocolError(f"unreadable solver output near {text[position:position + 20]!r}")
        position = match.end()
        token = next((g for g in match.groups() if g is not None), None)
        if token is None or token.startswith(";"):
            continue
        tokens.append(token)
    return tokens


def parse_sexprs(text: str) -> List[SExpr]:
    """Parse every top-level s-expression; quoted symbols lose their bars."""
    stack: List[List[SExpr]] = [[]]
    for token in tokenize(text):
        if token == "(":
            stack.append([])
        elif token == ")":
            if len(stack) == 1:
                raise SolverProtocolError("unbalanced ')' in solver output")
            done = stack.pop()
            stack[-1].append(done)
        elif token.startswith("|"):
            stack[-1].append(token[1:-1])
        else:
            stack[-1].append(token)
    if len(stack) != 1:
        raise SolverProtocolError("unterminated s-expression in solver output")
    return stack[0]


_BINARY_BACK = {
    "=>": IMPLIES, "div": DIV, "mod": MOD, ">=": GE, ">": GT, "<=": LE, "<": LT, "*": TIMES,
}


def from_sexpr(expr: SExpr, env: Mapping[str, Var]) -> Term:
    """Read a solver expression back into a theory term."""
    if isinstance(expr, str):
        if expr == "true":
            return TRUE
        if expr == "false":
            return FALSE
        if re.fullmatch(r"\d+", expr):
            return int_value(int(expr))
        if expr in env:
            return env[expr]
        raise SolverProtocolError(f"unknown symbol {expr} in solver output")
    if not expr:
        raise SolverProtocolError("empty application in solver output")
    head, rest = expr[0], [from_sexpr(e, env) for e in expr[1:]]
    if head == "-" and len(rest) == 1:
        arg = rest[0]
        if isinstance(arg, App) and arg.symbol.is_value:
            return int_value(-arg.symbol.value)
        return mk_app(NEG, arg)
    if head == "not":
        return mk_app(NOT, rest[0])
    if head in ("and", "or", "+", "-"):
        symbol = {"and": AND, "or": OR, "+": PLUS, "-": MINUS}[head]
        result = rest[0]
        for arg in rest[1:]:
            result = mk_app(symbol, result, arg)
        return result
    if head in ("=", "distinct"):
        is_bool = rest[0].sort == BOOL
        if head == "=":
            return mk_app(EQ_BOOL if is_bool else EQ_INT, *rest)
        return mk_app(NEQ_BOOL if is_bool else NEQ_INT, *rest)
    if head in _BINARY_BACK and len(rest) == 2:
        return mk_app(_BINARY_BACK[head], *rest)
    raise SolverProtocolError(f"unsupported operator {head} in solver output")


def parse_model(response: SExpr, env: Mapping[str, Var]) -> Dict[Var, Union[int, bool]]:
    """Values of ``define-fun`` entries; accepts both the ``(model ...)`` and the bare list form."""
    if not isinstance(response, list):
        raise SolverProtocolError(f"expected a model, got {response!r}")
    entries = response[1:] if response and response[0] == "model" else response
    model: Dict[Var, Union[int, bool]] = {}
    for entry in entries:
        if not (isinstance(entry, list) and len(entry) == 5 and entry[0] == "define-fun"):
            continue
        name, params, value = entry[1], entry[2], entry[4]
        if params or name not in env:
            continue
        try:
            model[env[name]] = eval_ground(from_sexpr(value, {}))
        except EvaluationError as exc:
            raise SolverProtocolError(f"cannot read model value of {name}: {exc}") from exc
    return model


# ============================================================================
# SOLVER PROCESS
# ============================================================================

class SolverTimeout(Exception):
    pass


class SmtSession:
    """One solver process, started on first use."""

    def __init__(self, command: Union[str, Sequence[str]], timeout_ms: int = 5000):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout_ms = timeout_ms
        self._process: Optional[subprocess.Popen] = None
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        self.restarts = 0

    @property
    def available(self) -> bool:
        return bool(self.command) and shutil.which(self.command[0]) is not None

    def start(self) -> None:
        if self._process is not None and self._process.poll() is None:
            return
        if not self.available:
            raise SolverUnavailable(f"solver command {' '.join(self.command) or '<empty>'} not found")
        logger.info("starting solver process: %s", " ".join(self.command))
        self._lines = queue.Queue()
        self._process = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            bufsize=1,
        )
        reader = threading.Thread(target=self._pump, args=(self._process, self._lines), daemon=True)
        reader.start()

    @staticmethod
    def _pump(process: subprocess.Popen, lines: "queue.Queue[Optional[str]]") -> None:
        for line in process.stdout:
            lines.put(line)
        lines.put(None)

    def send(self, command: str) -> None:
        logger.debug("smt> %s", command)
        try:
            self._process.stdin.write(command + "\n")
            self._process.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise SolverProtocolError(f"solver process closed its input: {exc}") from exc

    def read_response(self, deadline: float) -> SExpr:
        collected: List[str] = []
        depth = 0
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise SolverTimeout()
            try:
                line = self._lines.get(timeout=remaining)
            except queue.Empty:
                raise SolverTimeout() from None
            if line is None:
                raise SolverProtocolError("solver process exited unexpectedly")
            if not line.strip():
                continue
            collected.append(line)
            depth += line.count("(") - line.count(")")
            if depth <= 0:
                break
        text = "".join(collected)
        logger.debug("smt< %s", text.strip())
        exprs = parse_sexprs(text)
        if len(exprs) != 1:
            raise SolverProtocolError(f"expected one response, got {text!r}")
        response = exprs[0]
        if isinstance(response, list) and response and response[0] == "error":
            raise SolverProtocolError(f"solver error: {' '.join(map(str, response[1:]))}")
        return response

    def run(self, script: Sequence[str], env: Optional[Mapping[str, Var]] = None) -> SatResult:
        """Run a script ending in ``(check-sat)``; fetch a model when ``env`` is given."""
        self.start()
        deadline = time.monotonic() + self.timeout_ms / 1000.0
        try:
            self.send("(reset)")
            for command in script:
                self.send(command)
            self.send("(check-sat)")
            answer = self.read_response(deadline)
            if answer == "unsat":
                return SatResult.unsat(backend="external")
            if answer == "unknown":
                return SatResult.unknown("solver returned unknown", backend="external")
            if answer != "sat":
                raise SolverProtocolError(f"unexpected check-sat answer {answer!r}")
            if env is None:
                return SatResult.sat({}, backend="external")
            self.send("(get-model)")
            return SatResult.sat(parse_model(self.read_response(deadline), env), backend="external")
        except SolverTimeout:
            logger.warning("solver timed out after %d ms; restarting", self.timeout_ms)
            self.kill()
            self.restarts += 1
            return SatResult.unknown("timeout", backend="external")

    def kill(self) -> None:
        if self._process is not None:
            self._process.kill()
            self._process.wait()
            self._process = None

    def close(self) -> None:
        if self._process is None:
            return
        try:
            self.send("(exit)")
            self._process.wait(timeout=1)
        except (SolverProtocolError, subprocess.TimeoutExpired):
            self._process.kill()
            self._process.wait()
        self._process = None


class ExternalSolver:
    """Satisfiability and equivalence through an SMT-LIB process."""

    def __init__(self, command: Union[str, Sequence[str]], timeout_ms: int = 5000):
        self.session = SmtSession(command, timeout_ms)

    @property
    def available(self) -> bool:
        return self.session.available

    def is_satisfiable(self, phi: Term) -> SatResult:
        free = variables(phi)
        env = {v.name: v for v in free}
        result = self.session.run(sat_script(phi), env)
        if not result.is_sat:
            return result
        model = {v: result.model.get(v, False if v.sort == BOOL else 0) for v in free}
        try:
            if eval_under(phi, model) is not True:
                return SatResult.unknown("solver model failed the evaluation check", backend="external")
        except EvaluationError as exc:
            return SatResult.unknown(str(exc), backend="external")
        return SatResult.sat(model, backend="external")

    def check_equiv(self, phi: Term, psi: Term, exist_phi: Sequence[Var], exist_psi: Sequence[Var]) -> EquivVerdict:
        result = self.session.run(equiv_script(phi, psi, exist_phi, exist_psi))
        if result.is_unsat:
            return EquivVerdict.EQUIV
        if result.is_sat:
            return EquivVerdict.NOT_EQUIV
        return EquivVerdict.UNKNOWN

    def close(self) -> None:
        self.session.close()

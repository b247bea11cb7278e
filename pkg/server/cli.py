"""
Command-line front end
======================

    python -m server.cli check r1.lctrs
    python -m server.cli complement --format json r1.lctrs
    python -m server.cli diff --signature list.lctrs p.pat q.pat --oracle-check --int-range=-2..2
    python -m server.cli complete r1.lctrs --rhs 0

Exit status: 0 quasi-reducible (or an exact result), 1 not quasi-reducible,
2 unknown or inconclusive, 3 input error, 4 oracle mismatch. The report
goes to standard output; diagnostics and logs go to standard error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from server.lctrs.config import BACKENDS, EQUIV_MODES, FORMATS, ConfigManager, parse_int_range
from server.lctrs.constrained import value_free
from server.lctrs.context import AnalysisContext
from server.lctrs.difference import DiffOutcome, diff_sets
from server.lctrs.errors import (
    ConfigurationError, Diagnostic, InconclusiveSatisfiability, LctrsError, ParseError, ValidationFailed,
)
from server.lctrs.logging_config import configure_logging
from server.lctrs.quasi_reducibility import (
    QrKind, QrVerdict, complete_with_witnesses, copat, left_hand_sides, quasi_reducible, validate,
)
from server.lctrs_io.export import OracleModel, export_diagnostics, export_json
from server.lctrs_io.parser import parse_lctrs, parse_patterns, parse_term
from server.lctrs_io.printer import print_constrained_pattern, print_lctrs
from server.oracle.ginst_oracle import (
    FiniteFragment, OracleReport, check_witnesses, compare_diff_semantics,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_QUASI_REDUCIBLE = 1
EXIT_UNKNOWN = 2
EXIT_INPUT_ERROR = 3
EXIT_ORACLE_MISMATCH = 4

_EXIT_BY_KIND = {
    QrKind.QUASI_REDUCIBLE: EXIT_OK,
    QrKind.NOT_QUASI_REDUCIBLE: EXIT_NOT_QUASI_REDUCIBLE,
    QrKind.UNKNOWN: EXIT_UNKNOWN,
}


class Cli:
    """One invocation: parsed arguments, configuration and output streams."""

    def __init__(self, args: argparse.Namespace, config: ConfigManager,
                 stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr):
        self.args = args
        self.config = config
        self.stdout = stdout
        self.stderr = stderr

    @property
    def json_output(self) -> bool:
        return self.config.output.format == "json"

    def emit(self, text: str) -> None:
        print(text, file=self.stdout)

    def note(self, text: str) -> None:
        print(text, file=self.stderr)

    def fragment(self) -> FiniteFragment:
        return FiniteFragment.from_config(self.config.oracle)

    def report_diagnostics(self, diagnostics: Sequence[Diagnostic], path: Optional[str] = None) -> None:
        prefix = f"{path}:" if path else ""
        for d in diagnostics:
            self.note(f"{prefix}{d}")

    # -- oracle -------------------------------------------------------------

    def _oracle_text(self, report: OracleReport) -> List[str]:
        if report.ok:
            return ["oracle: OK"]
        lines = [f"oracle: MISMATCH ({len(report.missing)} missing, {len(report.unexpected)} unexpected)"]
        lines += [f"  missing: {t}" for t in report.missing]
        lines += [f"  unexpected: {t}" for t in report.unexpected]
        return lines

    @staticmethod
    def _oracle_model(report: Optional[OracleReport]) -> Optional[OracleModel]:
        if report is None:
            return None
        return OracleModel(ok=report.ok, missing=report.missing, unexpected=report.unexpected)

    # -- commands -----------------------------------------------------------

    def _load_system(self):
        path = self.args.input
        return parse_lctrs(Path(path).read_text(encoding="utf-8"))

    def _print_verdict(self, verdict: QrVerdict, oracle: Optional[OracleReport]) -> None:
        self.report_diagnostics(verdict.diagnostics, self.args.input)
        if self.json_output:
            self.emit(export_json(verdict, self._oracle_model(oracle)))
            return
        headline = verdict.kind.value
        if verdict.reason:
            headline += f": {verdict.reason}"
        self.emit(headline)
        for w in verdict.witnesses:
            self.emit(f"  {print_constrained_pattern(w)}")
        if oracle is not None:
            for line in self._oracle_text(oracle):
                self.emit(line)

    def cmd_check(self) -> int:
        system = self._load_system()
        oracle = None
        with AnalysisContext.from_config(system.signature, self.config) as ctx:
            verdict = quasi_reducible(system, ctx)
            if self.args.oracle_check:
                oracle = check_witnesses(system, verdict.witnesses, self.fragment(), ctx.solver)
        self._print_verdict(verdict, oracle)
        if oracle is not None and not oracle.ok and verdict.kind is not QrKind.UNKNOWN:
            return EXIT_ORACLE_MISMATCH
        return _EXIT_BY_KIND[verdict.kind]

    def _print_outcome(self, outcome: DiffOutcome, oracle: Optional[OracleReport]) -> None:
        if self.json_output:
            self.emit(export_json(outcome, self._oracle_model(oracle)))
            return
        if not outcome.is_exact:
            self.note(f"inconclusive: {'; '.join(outcome.reasons)}")
        for ct in outcome.result:
            self.emit(print_constrained_pattern(ct))
        if oracle is not None:
            for line in self._oracle_text(oracle):
                self.emit(line)

    def _outcome_status(self, outcome: DiffOutcome, oracle: Optional[OracleReport]) -> int:
        if not outcome.is_exact:
            return EXIT_UNKNOWN
        if oracle is not None and not oracle.ok:
            return EXIT_ORACLE_MISMATCH
        return EXIT_OK

    def cmd_complement(self) -> int:
        system = self._load_system()
        diagnostics = validate(system)
        errors = [d for d in diagnostics if d.is_error]
        if errors:
            raise ValidationFailed(errors)
        self.report_diagnostics(diagnostics, self.args.input)
        oracle = None
        with AnalysisContext.from_config(system.signature, self.config) as ctx:
            outcome = copat(left_hand_sides(system, ctx), ctx)
            if self.args.oracle_check:
                oracle = check_witnesses(system, outcome.result, self.fragment(), ctx.solver)
        if not outcome.result and not self.json_output:
            self.note("complete: every ground pattern is covered")
        self._print_outcome(outcome, oracle)
        return self._outcome_status(outcome, oracle)

    def cmd_diff(self) -> int:
        signature_text = Path(self.args.signature).read_text(encoding="utf-8") if self.args.signature else None
        texts = [Path(p).read_text(encoding="utf-8") for p in (self.args.dividends, self.args.divisors)]
        signature, (P, Q) = parse_patterns(signature_text, texts)
        with AnalysisContext.from_config(signature, self.config) as ctx:
            ctx.reserve(*P, *Q)
            P = [value_free(ct, ctx.fresh) for ct in P]
            Q = [value_free(ct, ctx.fresh) for ct in Q]
            outcome = diff_sets(P, Q, ctx)
        oracle = None
        if self.args.oracle_check:
            oracle = compare_diff_semantics(P, Q, outcome.result, self.fragment(), signature)
        self._print_outcome(outcome, oracle)
        return self._outcome_status(outcome, oracle)

    def cmd_complete(self) -> int:
        system = self._load_system()
        rhs = parse_term(self.args.rhs, system.signature) if self.args.rhs else None
        with AnalysisContext.from_config(system.signature, self.config) as ctx:
            try:
                completed = complete_with_witnesses(system, rhs, ctx)
            except InconclusiveSatisfiability as exc:
                self.note(f"unknown: {exc.reason}")
                return EXIT_UNKNOWN
        self.emit(print_lctrs(completed).rstrip("\n"))
        return EXIT_OK

    def run(self) -> int:
        commands: Dict[str, Callable[[], int]] = {
            "check": self.cmd_check,
            "complement": self.cmd_complement,
            "diff": self.cmd_diff,
            "complete": self.cmd_complete,
        }
        try:
            return commands[self.args.command]()
        except (ParseError, ValidationFailed) as exc:
            self.report_diagnostics(exc.diagnostics, getattr(self.args, "input", None))
            if self.json_output:
                self.emit(export_diagnostics(exc.diagnostics))
            return EXIT_INPUT_ERROR
        except OSError as exc:
            self.note(f"error: {exc}")
            return EXIT_INPUT_ERROR
        except LctrsError as exc:
            logger.debug("%s failed", self.args.command, exc_info=True)
            self.note(f"error: {exc}")
            return EXIT_INPUT_ERROR


# ============================================================================
# ARGUMENTS
# ============================================================================

def _int_range(text: str):
    try:
        return parse_int_range(text)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--solver", choices=BACKENDS, help="constraint solver backend")
    common.add_argument("--solver-cmd", help="external solver command line (e.g. 'z3 -in')")
    common.add_argument("--timeout-ms", type=int, help="external solver timeout per query")
    common.add_argument("--format", choices=FORMATS, help="report format")
    common.add_argument("--equiv", choices=EQUIV_MODES, help="duplicate detection mode")
    common.add_argument("--oracle-check", action="store_true", help="verify the result on a finite fragment")
    common.add_argument("--int-range", type=_int_range, help="oracle integer range a..b (write --int-range=-2..2)")
    common.add_argument("--max-height", type=int, help="oracle term height bound")
    common.add_argument("--log-level", help="logging level (default WARNING)")
    common.add_argument("--json-logs", action="store_true", default=None, help="JSON log records")
    common.add_argument("--env-file", help="dotenv file to load")

    parser = argparse.ArgumentParser(
        prog="lctrs",
        description="Complement, difference and quasi-reducibility of constrained patterns",
    )
    parser.add_argument("--show-config", action="store_true", help="print the effective configuration and exit")
    commands = parser.add_subparsers(dest="command")

    check = commands.add_parser("check", parents=[common], help="decide quasi-reducibility")
    check.add_argument("input")

    complement = commands.add_parser("complement", parents=[common], help="print the complement of the left-hand sides")
    complement.add_argument("input")

    diff = commands.add_parser("diff", parents=[common], help="subtract one pattern set from another")
    diff.add_argument("--signature", help="file declaring sorts and symbols")
    diff.add_argument("dividends")
    diff.add_argument("divisors")

    complete = commands.add_parser("complete", parents=[common], help="add one rule per witness")
    complete.add_argument("input")
    complete.add_argument("--rhs", help="right-hand side of the added rules")
    return parser


def load_config(args: argparse.Namespace) -> ConfigManager:
    config = ConfigManager(getattr(args, "env_file", None))
    int_range = getattr(args, "int_range", None) or (None, None)
    config.update("solver", backend=getattr(args, "solver", None),
                  command=getattr(args, "solver_cmd", None), timeout_ms=getattr(args, "timeout_ms", None))
    config.update("analysis", equiv_mode=getattr(args, "equiv", None))
    config.update("oracle", int_min=int_range[0], int_max=int_range[1],
                  max_height=getattr(args, "max_height", None))
    config.update("output", format=getattr(args, "format", None),
                  log_level=getattr(args, "log_level", None), json_logs=getattr(args, "json_logs", None))
    if not config.validate_config():
        raise ConfigurationError("invalid configuration")
    return config


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = load_config(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT_ERROR

    configure_logging(config.output.log_level, config.output.json_logs, stream=stderr)

    if args.show_config:
        print(json.dumps(config.get_config_dict(), indent=2), file=stdout)
        return EXIT_OK
    if args.command is None:
        parser.print_usage(stderr)
        return EXIT_INPUT_ERROR

    logger.debug("configuration: %s", config.get_config_dict())
    return Cli(args, config, stdout, stderr).run()


if __name__ == "__main__":
    sys.exit(main())

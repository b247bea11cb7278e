import json

from server.lctrs.constrained import ConstrainedTerm
from server.lctrs.difference import DiffOutcome, DiffStatus
from server.lctrs.errors import Diagnostic, Severity, SourceSpan
from server.lctrs.quasi_reducibility import QrKind, QrVerdict, copat, left_hand_sides, quasi_reducible
from server.lctrs.terms import LE, mk_app, mk_not
from server.lctrs_io.export import OracleModel, export_diagnostics, export_json, witness_model
from tests.support import builtin_context, f, ivar, lvar, nil, num


def test_quasi_reducible():
    assert export_json(QrVerdict(QrKind.QUASI_REDUCIBLE)) == '{"verdict":"quasi-reducible","witnesses":[]}'


def test_witnesses_are_printed_canonically(r1):
    report = json.loads(export_json(quasi_reducible(r1, builtin_context(r1.signature))))
    assert report["verdict"] == "not-quasi-reducible"
    assert len(report["witnesses"]) == 3
    assert {w["status"] for w in report["witnesses"]} == {"exact"}
    assert all("#" not in w["term"] for w in report["witnesses"])
    assert "reason" not in report


def test_single_witness():
    y = ivar("y#7")
    witness = ConstrainedTerm(f(nil(), y), mk_not(mk_app(LE, y, num(0))))
    assert witness_model(witness).model_dump() == {
        "term": "f(nil, y)", "constraint": "not (y <= 0)", "status": "exact",
    }


def test_unknown_without_witnesses():
    verdict = QrVerdict(QrKind.UNKNOWN, [], "non-linear constraint")
    assert json.loads(export_json(verdict)) == {"verdict": "unknown", "reason": "non-linear constraint"}


def test_oracle_section():
    oracle = OracleModel(ok=False, missing=["f(nil, 1)"])
    report = json.loads(export_json(QrVerdict(QrKind.QUASI_REDUCIBLE), oracle))
    assert report["oracle"] == {"ok": False, "missing": ["f(nil, 1)"], "unexpected": []}


def test_diff_outcome():
    outcome = DiffOutcome([ConstrainedTerm(f(lvar("xs"), ivar("y")))], DiffStatus.INCONCLUSIVE, ["a", "b"])
    report = json.loads(export_json(outcome))
    assert report == {
        "verdict": "inconclusive",
        "reason": "a; b",
        "witnesses": [{"term": "f(xs, y)", "constraint": "true", "status": "inconclusive"}],
    }


def test_complement_uses_the_verdict_schema(r1, r1prime):
    ctx = builtin_context(r1.signature)
    report = json.loads(export_json(copat(left_hand_sides(r1, ctx), ctx)))
    assert set(report) == {"verdict", "witnesses"}
    assert report["verdict"] == "exact"
    assert [sorted(w) for w in report["witnesses"]] == [["constraint", "status", "term"]] * 3

    ctx = builtin_context(r1prime.signature)
    complete = export_json(copat(left_hand_sides(r1prime, ctx), ctx))
    assert complete == '{"verdict":"exact","witnesses":[]}'


def test_diagnostics():
    span = SourceSpan(7, 22, 7, 23, 120, 121)
    text = export_diagnostics([Diagnostic(Severity.ERROR, "syntax", "expected an operand", span)])
    assert json.loads(text) == {
        "verdict": "input-error",
        "diagnostics": [{
            "severity": "error", "code": "syntax", "message": "expected an operand", "line": 7, "column": 22,
        }],
    }

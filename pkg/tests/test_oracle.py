import pytest

from server.lctrs.config import OracleConfig
from server.lctrs.constrained import ConstrainedTerm
from server.lctrs.errors import ConfigurationError
from server.lctrs.terms import EQ_INT, INT, LE, PLUS, TRUE, mk_app
from server.oracle.ginst_oracle import (
    FiniteFragment, GroundEnumerator, OracleReport, check_quasi_reducible, check_witnesses,
    enumerate_ground, enumerate_ground_patterns, ginst, ginst_all,
)
from tests.support import LIST, SIG1, SIG1_PRIME, cons, f, ivar, lvar, nil, num

y, z = ivar("y"), ivar("z")


def list_count(k, height):
    return 1 if height == 1 else 1 + k * list_count(k, height - 1)


class TestFragment:
    def test_rejects_empty_fragments(self):
        with pytest.raises(ConfigurationError):
            FiniteFragment(1, 0, 3)
        with pytest.raises(ConfigurationError):
            FiniteFragment(0, 1, 0)

    def test_from_config(self):
        assert FiniteFragment.from_config(OracleConfig(-1, 3, 2)) == FiniteFragment(-1, 3, 2)

    def test_finite_value_family_narrows_the_range(self):
        assert FiniteFragment(-2, 2, 3).ints(SIG1_PRIME) == [0, 1]
        assert FiniteFragment(-2, 2, 3).ints(SIG1) == [-2, -1, 0, 1, 2]


class TestEnumeration:
    @pytest.mark.parametrize("low,high,height", [(-1, 1, 4), (0, 1, 3), (0, 0, 5), (-2, 2, 1)])
    def test_list_counts(self, low, high, height):
        lists = enumerate_ground(LIST, FiniteFragment(low, high, height), SIG1)
        assert len(lists) == list_count(high - low + 1, height)
        assert len(set(lists)) == len(lists)

    def test_known_count(self):
        assert len(enumerate_ground(LIST, FiniteFragment(-1, 1, 4), SIG1)) == 40

    def test_integers(self):
        assert enumerate_ground(INT, FiniteFragment(-1, 1, 1), SIG1) == [num(-1), num(0), num(1)]

    def test_ground_patterns(self):
        frag = FiniteFragment(-1, 1, 3)
        assert len(enumerate_ground_patterns(SIG1, frag)) == list_count(3, 3) * 3

    def test_memoized_by_height(self):
        enumerator = GroundEnumerator(SIG1, FiniteFragment(0, 1, 3))
        assert enumerator.upto(LIST, 2) is enumerator.upto(LIST, 2)
        assert enumerator.upto(LIST, 0) == []


class TestGroundInstances:
    def test_constrained(self, frag):
        ct = ConstrainedTerm(f(nil(), y), mk_app(LE, y, num(0)))
        assert ginst(ct, frag, SIG1) == {f(nil(), num(n)) for n in (-2, -1, 0)}

    def test_height_bound_applies_to_arguments(self):
        frag = FiniteFragment(0, 0, 2)
        assert ginst(ConstrainedTerm(f(lvar("xs"), y)), frag, SIG1) == {
            f(nil(), num(0)), f(cons(num(0), nil()), num(0)),
        }
        assert ginst(ConstrainedTerm(f(cons(z, cons(z, lvar("xs"))), y)), frag, SIG1) == set()

    def test_values_outside_the_fragment(self, frag):
        assert ginst(ConstrainedTerm(f(nil(), num(7))), frag, SIG1) == set()

    def test_non_linear_terms(self, frag):
        instances = ginst(ConstrainedTerm(f(cons(y, nil()), y)), frag, SIG1)
        assert len(instances) == 5
        assert f(cons(num(1), nil()), num(1)) in instances

    def test_constraint_only_variables_are_existential(self, frag):
        ct = ConstrainedTerm(f(nil(), y), mk_app(EQ_INT, y, mk_app(PLUS, z, num(1))))
        assert len(ginst(ct, frag, SIG1)) == 5
        assert ginst(ct, frag, SIG1_PRIME) == {f(nil(), num(1))}

    def test_union(self, frag):
        parts = [ConstrainedTerm(f(nil(), y), mk_app(LE, y, num(0))), ConstrainedTerm(f(nil(), num(0)), TRUE)]
        assert len(ginst_all(parts, frag, SIG1)) == 3


class TestChecks:
    def test_report(self):
        report = OracleReport.compare({f(nil(), num(0))}, {f(nil(), num(1))})
        assert report.missing == ["f(nil,0)"]
        assert report.unexpected == ["f(nil,1)"]
        assert not report.ok
        assert OracleReport.compare(set(), set()).ok

    def test_r1_without_witnesses_fails(self, r1, frag):
        report = check_witnesses(r1, [], frag)
        assert not report.ok
        assert report.missing and not report.unexpected

    def test_r1prime_is_quasi_reducible(self, r1prime, frag):
        assert check_quasi_reducible(r1prime, frag).ok

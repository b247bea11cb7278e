import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from server.lctrs.constrained import ConstrainedTerm, value_free
from server.lctrs.difference import (
    DiffStatus, diff, diff_sets, diff_unconstrained, diff_weight, multiset_greater, weight_greater,
)
from server.lctrs.errors import (
    DividendNotValueFree, DivisorNotLinear, InfiniteComplement, NotAPattern, StepLimitExceeded,
)
from server.lctrs.quasi_reducibility import left_hand_sides
from server.lctrs.terms import (
    EQ_INT, GT, LE, NOT, TIMES, TRUE, height, is_linear, is_variant, mk_app, more_general,
    strictly_more_general,
)
from server.lctrs_io.printer import print_constrained_pattern
from server.oracle.ginst_oracle import FiniteFragment, GroundEnumerator, compare_diff_semantics, ginst
from tests.strategies import constrained_patterns, divisor_lists
from tests.support import (
    SIG1, builtin_context, cons, f, ivar, lvar, nil, num, pattern, same_up_to_renaming,
)

x, y, z, w = (ivar(n) for n in ("x", "y", "z", "w"))
xs, ys, zs = lvar("xs"), lvar("ys"), lvar("zs")

FRAGMENT = FiniteFragment(-2, 2, 3)


def cmp(symbol, left, right):
    return mk_app(symbol, left, right)


def pairwise_disjoint(patterns, frag=FRAGMENT, sig=SIG1):
    enumerator = GroundEnumerator(sig, frag)
    instances = [ginst(ct, frag, sig, enumerator) for ct in patterns]
    return all(not (a & b) for a, b in itertools.combinations(instances, 2))


class TestUnconstrained:
    def test_complement_of_a_ground_instance(self, ctx_prime):
        result = diff_unconstrained(f(xs, y), f(nil(), num(0)), ctx_prime)
        assert same_up_to_renaming(
            result, [f(nil(), num(1)), f(cons(x, xs), num(0)), f(cons(x, xs), num(1))],
        )

    def test_self_difference_is_empty(self, ctx):
        assert diff_unconstrained(f(cons(x, xs), y), f(cons(x, xs), y), ctx) == []

    def test_clash_keeps_the_dividend(self, ctx):
        assert diff_unconstrained(f(nil(), y), f(cons(x, xs), z), ctx) == [f(nil(), y)]

    def test_values_over_unbounded_integers(self, ctx):
        with pytest.raises(InfiniteComplement):
            diff_unconstrained(f(xs, y), f(nil(), num(0)), ctx)

    def test_divisor_must_be_linear(self, ctx):
        with pytest.raises(DivisorNotLinear):
            diff_unconstrained(f(xs, y), f(cons(y, nil()), y), ctx)
        with pytest.raises(NotAPattern):
            diff_unconstrained(cons(x, xs), f(xs, y), ctx)


class TestConstrained:
    def test_general_pattern_minus_constrained_base_case(self, ctx):
        outcome = diff(pattern(f(xs, y)), pattern(f(nil(), ivar("ya")), cmp(LE, ivar("ya"), num(0))), ctx)
        assert outcome.is_exact
        first, second = outcome.result
        assert is_variant(first.term, f(cons(x, xs), y))
        assert first.constraint == TRUE
        assert print_constrained_pattern(second) == "f(nil, ya) [not (ya <= 0)]"

    def test_equivalent_divisor_removes_everything(self, ctx):
        dividend = pattern(f(cons(x, xs), y), cmp(GT, y, num(0)))
        divisor = pattern(f(cons(z, zs), w), cmp(GT, w, num(0)))
        outcome = diff(dividend, divisor, ctx)
        assert outcome.result == []
        assert outcome.status is DiffStatus.EXACT

    def test_clash_keeps_the_dividend(self, ctx):
        dividend = pattern(f(nil(), y), cmp(LE, y, num(0)))
        assert diff(dividend, pattern(f(cons(x, xs), z)), ctx).result == [dividend]

    def test_disjoint_constraints_keep_the_dividend(self, ctx):
        dividend = pattern(f(xs, y), cmp(LE, y, num(0)))
        assert diff(dividend, pattern(f(ys, z), cmp(GT, z, num(0))), ctx).result == [dividend]

    def test_divisor_values_are_abstracted(self, ctx):
        outcome = diff(pattern(f(nil(), y)), pattern(f(nil(), num(0))), ctx)
        (piece,) = outcome.result
        assert piece.term.args[0] == nil()
        assert compare_diff_semantics([pattern(f(nil(), y))], [pattern(f(nil(), num(0)))],
                                      outcome.result, FRAGMENT, SIG1).ok

    def test_input_checks(self, ctx):
        with pytest.raises(DividendNotValueFree):
            diff(pattern(f(nil(), num(0))), pattern(f(xs, y)), ctx)
        with pytest.raises(DivisorNotLinear):
            diff(pattern(f(xs, y)), pattern(f(cons(z, nil()), z)), ctx)
        with pytest.raises(NotAPattern):
            diff(pattern(f(xs, mk_app(TIMES, y, y))), pattern(f(xs, y)), ctx)

    def test_unknown_satisfiability_is_inconclusive(self, ctx):
        dividend = pattern(f(cons(x, nil()), y), cmp(EQ_INT, cmp(TIMES, x, y), num(7)))
        outcome = diff(dividend, pattern(f(cons(z, zs), w), cmp(GT, w, num(0))), ctx)
        assert outcome.status is DiffStatus.INCONCLUSIVE
        assert outcome.reasons
        (kept,) = outcome.result
        assert kept.constraint.args[1].symbol == NOT


class TestSets:
    def test_r1_left_hand_sides(self, r1):
        with builtin_context(r1.signature) as ctx:
            Q = left_hand_sides(r1, ctx)
            P = [pattern(f(lvar("xs0"), ivar("y0")))]
            outcome = diff_sets(P, Q, ctx)
        assert outcome.is_exact
        assert same_up_to_renaming(
            [ct.term for ct in outcome.result],
            [f(nil(), y), f(cons(x, nil()), y), f(cons(x, cons(z, zs)), y)],
        )
        assert compare_diff_semantics(P, Q, outcome.result, FiniteFragment(-3, 3, 4), r1.signature).ok

    def test_trivial_sets(self, ctx):
        P = [pattern(f(xs, y), cmp(GT, y, num(0)))]
        assert diff_sets(P, [], ctx).result == P
        assert diff_sets([], P, ctx).result == []
        assert diff_sets(P, P, ctx).result == []

    def test_members_must_be_linear(self, ctx):
        with pytest.raises(DivisorNotLinear):
            diff_sets([pattern(f(cons(y, xs), y))], [], ctx)

    def test_step_limit(self, r1):
        with builtin_context(r1.signature) as ctx:
            ctx.max_diff_steps = 1
            with pytest.raises(StepLimitExceeded):
                diff_sets([pattern(f(lvar("xs0"), ivar("y0")))], left_hand_sides(r1, ctx), ctx)


class TestWeight:
    def test_counts_overlapping_divisors(self, ctx):
        general = pattern(f(xs, y))
        base = pattern(f(nil(), ivar("y1")), cmp(LE, ivar("y1"), num(0)))
        assert diff_weight([general], [base], ctx) == [(f(xs, y), 1)]
        assert diff_weight([], [base], ctx) == []

    def test_clash_does_not_count(self, ctx):
        dividend = pattern(f(nil(), y), cmp(LE, y, num(0)))
        assert diff_weight([dividend], [pattern(f(cons(x, xs), z))], ctx) == [(f(nil(), y), 0)]

    def test_lexicographic_order(self):
        assert weight_greater((f(xs, y), 0), (f(nil(), y), 7))
        assert weight_greater((f(xs, y), 2), (f(ys, z), 1))
        assert not weight_greater((f(xs, y), 1), (f(ys, z), 1))
        assert not weight_greater((f(nil(), y), 3), (f(cons(x, xs), y), 0))

    def test_multiset_extension(self):
        assert multiset_greater([(f(xs, y), 1)], [(f(nil(), y), 5), (f(cons(x, xs), y), 3)])
        assert multiset_greater([(f(xs, y), 1), (f(nil(), z), 0)], [(f(nil(), z), 0)])
        assert not multiset_greater([(f(xs, y), 1)], [(f(ys, z), 1)])
        assert not multiset_greater([(f(nil(), y), 1)], [(f(cons(x, xs), y), 0)])


# ============================================================================
# PROPERTIES
# ============================================================================

PROPERTY_SETTINGS = settings(
    max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow],
)


@PROPERTY_SETTINGS
@given(constrained_patterns("s", linear=False), constrained_patterns("t", values=True))
def test_single_difference_properties(dividend, divisor):
    with builtin_context(SIG1) as ctx:
        outcome = diff(dividend, divisor, ctx)
    assert outcome.is_exact
    s = dividend.term
    pieces = outcome.result

    assert pairwise_disjoint(pieces)
    if is_linear(s):
        assert all(is_linear(ct.term) for ct in pieces)
    variants = [i for i, ct in enumerate(pieces) if not strictly_more_general(s, ct.term)]
    assert all(more_general(s, ct.term) is not None for ct in pieces)
    assert variants in ([], [len(pieces) - 1])
    bound = max(height(s), height(divisor.term))
    assert all(height(ct.term) <= bound for ct in pieces)
    assert compare_diff_semantics([dividend], [divisor], pieces, FRAGMENT, SIG1).ok


@PROPERTY_SETTINGS
@given(st.data())
def test_set_difference_semantics_and_weight(data):
    first = data.draw(constrained_patterns("p"))
    divisors = data.draw(divisor_lists())
    general = ConstrainedTerm(f(lvar("xs_g"), ivar("y_g")))
    with builtin_context(SIG1) as ctx:
        if data.draw(st.booleans()):
            P = [first]
        else:
            P = diff_sets([general], [first], ctx).result
        ctx.reserve(*divisors)
        Q = [value_free(ct, ctx.fresh) for ct in divisors]
        trace = []
        outcome = diff_sets(P, Q, ctx, trace)

    assert outcome.is_exact
    assert compare_diff_semantics(P, divisors, outcome.result, FRAGMENT, SIG1).ok
    assert pairwise_disjoint(outcome.result)
    for step in trace:
        assert all(weight_greater(step.dividend_weight, piece) for piece in step.piece_weights)
        if step.isolated:
            assert multiset_greater(step.weight_before, step.weight_after)

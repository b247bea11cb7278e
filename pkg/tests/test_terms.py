import pytest

from server.lctrs.errors import InfiniteComplement, InvalidPosition, SortMismatch
from server.lctrs.terms import (
    INT, PLUS, App, FreshVariables, FunctionSymbol, Signature, Substitution, SymbolKind, Var,
    base_name, height, int_value, is_constructor_term, is_linear, is_linearity_preserving, is_pattern,
    is_theory_term, is_value_free, is_variant, iter_subterms, mk_app, more_general, replace_at,
    serialize, strictly_more_general, subterm_at, theory_symbol, value_positions, variables,
)
from tests.support import CONS, F, LIST, NIL, SIG1, SIG1_PRIME, cons, f, ivar, lvar, nil, num

x, y, z = ivar("x"), ivar("y"), ivar("z")
xs, ys = lvar("xs"), lvar("ys")


class TestConstruction:
    def test_argument_sorts_are_checked(self):
        with pytest.raises(SortMismatch):
            App(CONS, (nil(), nil()))

    def test_arity_is_checked(self):
        with pytest.raises(SortMismatch):
            App(NIL, (x,))

    def test_terms_are_hashable_and_structural(self):
        assert cons(x, nil()) == cons(ivar("x"), nil())
        assert len({f(xs, y), f(xs, y), f(ys, y)}) == 2

    def test_int_values_are_named_by_their_number(self):
        assert serialize(f(cons(num(-3), nil()), num(0))) == "f(cons(-3,nil),0)"

    def test_theory_symbol_lookup_uses_argument_sorts(self):
        assert theory_symbol("+", (INT, INT)) == PLUS
        assert theory_symbol("+", (INT,)) is None


class TestSignature:
    def test_constructors_of_term_sort(self):
        assert SIG1.constructors(LIST) == [NIL, CONS]

    def test_unbounded_int_has_no_finite_constructor_list(self):
        with pytest.raises(InfiniteComplement):
            SIG1.constructors(INT)

    def test_restricted_int_values(self):
        assert [s.name for s in SIG1_PRIME.constructors(INT)] == ["0", "1"]
        assert SIG1_PRIME.values_of(INT) == [int_value(0), int_value(1)]

    def test_defined_symbols(self):
        assert SIG1.defined_symbols() == [F]
        assert SIG1.term_sorts() == [LIST]

    def test_theory_names_cannot_be_redeclared(self):
        plus = FunctionSymbol("+", (LIST, LIST), LIST, SymbolKind.DEFINED)
        with pytest.raises(SortMismatch):
            Signature.build([LIST], [plus])


class TestStructure:
    def test_height(self):
        assert height(x) == 0
        assert height(nil()) == 1
        assert height(cons(x, cons(num(1), nil()))) == 3

    def test_positions_and_subterms(self):
        t = f(cons(x, xs), y)
        assert subterm_at(t, (1, 2)) == xs
        assert [p for p, _ in iter_subterms(t)] == [(), (1,), (1, 1), (1, 2), (2,)]
        with pytest.raises(InvalidPosition):
            subterm_at(t, (3,))

    def test_replace_at_keeps_sorts(self):
        t = f(xs, y)
        assert replace_at(t, (1,), nil()) == f(nil(), y)
        with pytest.raises(SortMismatch):
            replace_at(t, (2,), nil())

    def test_variables_in_first_occurrence_order(self):
        assert variables(f(cons(y, xs), x), mk_app(PLUS, x, z)) == [y, xs, x, z]

    def test_linearity(self):
        assert is_linear(f(cons(x, xs), y))
        assert not is_linear(f(cons(y, xs), y))

    def test_value_positions(self):
        t = f(cons(num(1), xs), num(0))
        assert value_positions(t) == [(1, 1), (2,)]
        assert not is_value_free(t)
        assert is_value_free(f(xs, y))

    def test_pattern_classification(self):
        assert is_pattern(f(cons(x, xs), num(0)))
        assert not is_pattern(cons(x, xs))
        assert not is_pattern(f(xs, mk_app(PLUS, x, y)))
        assert not is_pattern(f(nil(), f(xs, y)))
        assert is_pattern(f(xs, y), SIG1)

    def test_constructor_and_theory_terms(self):
        assert is_constructor_term(cons(num(2), xs))
        assert not is_constructor_term(f(xs, y))
        assert is_theory_term(mk_app(PLUS, x, num(1)))
        assert not is_theory_term(cons(x, nil()))


class TestSubstitution:
    def test_identity_bindings_are_dropped(self):
        sigma = Substitution({x: x, y: num(1)})
        assert len(sigma) == 1
        assert sigma.image(x) == x

    def test_sorts_must_agree(self):
        with pytest.raises(SortMismatch):
            Substitution({x: nil()})

    def test_apply_and_restrict(self):
        sigma = Substitution({xs: cons(x, nil()), y: num(0)})
        assert sigma.apply(f(xs, y)) == f(cons(x, nil()), num(0))
        assert sigma.restrict([y]) == Substitution({y: num(0)})

    def test_renaming(self):
        assert Substitution({x: y, y: x}).is_renaming()
        assert not Substitution({x: z, y: z}).is_renaming()

    def test_linearity_preservation(self):
        assert is_linearity_preserving(Substitution({xs: cons(x, ys), y: z}), [xs, y])
        assert not is_linearity_preserving(Substitution({xs: cons(z, ys), y: z}), [xs, y])
        assert not is_linearity_preserving(Substitution({xs: cons(z, cons(z, nil()))}), [xs])


class TestGenerality:
    def test_matching(self):
        sigma = more_general(f(xs, y), f(cons(x, nil()), num(1)))
        assert sigma == Substitution({xs: cons(x, nil()), y: num(1)})
        assert more_general(f(cons(x, xs), y), f(nil(), y)) is None

    def test_non_linear_matching_requires_equal_images(self):
        assert more_general(f(cons(y, xs), y), f(cons(num(1), nil()), num(1))) is not None
        assert more_general(f(cons(y, xs), y), f(cons(num(1), nil()), num(2))) is None

    def test_variants(self):
        assert is_variant(f(cons(x, xs), y), f(cons(z, ys), x))
        assert not is_variant(f(cons(x, xs), y), f(cons(y, xs), y))
        assert strictly_more_general(f(xs, y), f(nil(), y))
        assert not strictly_more_general(f(xs, y), f(ys, x))


class TestFreshVariables:
    def test_fresh_names_avoid_reserved_ones(self):
        fresh = FreshVariables(["x#1"])
        v = fresh.fresh(INT, "x")
        assert v.name == "x#2"
        assert v.sort == INT

    def test_hints_drop_previous_suffixes(self):
        fresh = FreshVariables()
        fresh.reserve(f(lvar("xs#1"), y))
        v = fresh.fresh(LIST, "xs#1")
        assert base_name(v) == "xs"
        assert v.name != "xs#1"

    def test_names_are_never_reused(self):
        fresh = FreshVariables()
        names = {fresh.fresh(INT, "y").name for _ in range(50)}
        assert len(names) == 50

    def test_reserved_constraint_names(self):
        fresh = FreshVariables()
        fresh.reserve_names(["y#1", "y#2"])
        assert fresh.fresh(INT, "y") == Var("y#3", INT)

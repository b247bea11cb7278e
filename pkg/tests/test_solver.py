import itertools

import pytest
from hypothesis import given, settings

from server.lctrs.config import SolverConfig
from server.lctrs.errors import DivisionByZero, NegativeExponent, NonGroundTerm, SolverUnavailable
from server.lctrs.terms import (
    BOOL, DIV, EQ_INT, EXP, FALSE, GE, GT, LE, LT, MOD, NEQ_INT, PLUS, TIMES, TRUE, Var,
    conjunction, mk_and, mk_app, mk_not, mk_or,
)
from server.solver.backend import ConstraintSolver
from server.solver.builtin import builtin_equiv, builtin_sat, eliminate_exists
from server.solver.evaluation import euclidean_div, euclidean_mod, eval_ground, eval_under
from server.solver.linear import FmVerdict, LinearConstraint, fm_solve, linearize
from server.solver.results import EquivVerdict, Verdict
from server.solver.simplify import simplify
from tests.strategies import unit_linear_constraints
from tests.support import ivar, num

x, y, z = ivar("x"), ivar("y"), ivar("z")
b = Var("b", BOOL)


def cmp(symbol, left, right):
    return mk_app(symbol, left, right)


class TestEvaluation:
    @pytest.mark.parametrize("a, d, q, r", [
        (7, 2, 3, 1), (-7, 2, -4, 1), (7, -2, -3, 1), (-7, -2, 4, 1), (6, 3, 2, 0),
    ])
    def test_euclidean_division(self, a, d, q, r):
        assert euclidean_div(a, d) == q
        assert euclidean_mod(a, d) == r
        assert a == d * q + r and 0 <= r < abs(d)

    def test_ground_terms(self):
        assert eval_ground(cmp(PLUS, num(2), cmp(TIMES, num(3), num(-1)))) == -1
        assert eval_ground(cmp(EXP, num(2), num(5))) == 32
        assert eval_ground(mk_and(TRUE, mk_not(FALSE))) is True

    def test_errors(self):
        with pytest.raises(DivisionByZero):
            eval_ground(cmp(DIV, num(1), num(0)))
        with pytest.raises(DivisionByZero):
            eval_ground(cmp(MOD, num(1), num(0)))
        with pytest.raises(NegativeExponent):
            eval_ground(cmp(EXP, num(2), num(-1)))
        with pytest.raises(NonGroundTerm):
            eval_ground(cmp(LE, x, num(0)))

    def test_under_a_model(self):
        assert eval_under(cmp(GT, cmp(PLUS, x, y), num(2)), {x: 2, y: 1}) is True


class TestLinear:
    def test_linearize(self):
        coeffs, const = linearize(cmp(PLUS, cmp(TIMES, num(2), x), cmp(PLUS, y, num(-3))))
        assert coeffs == {x: 2, y: 1}
        assert const == -3
        assert linearize(cmp(TIMES, x, y)) is None

    def test_normal_form_divides_by_gcd(self):
        c = LinearConstraint.of({x: 4, y: -2}, 5)
        assert c.coeffs == ((x, 2), (y, -1))
        assert c.bound == 2

    def test_fm_model_satisfies_constraints(self):
        constraints = [LinearConstraint.of({x: -1}, -2), LinearConstraint.of({x: 1, y: -1}, 0)]
        result = fm_solve(constraints)
        assert result.verdict is FmVerdict.SAT
        assert result.model[x] >= 2
        assert result.model[x] <= result.model[y]

    def test_fm_contradiction(self):
        result = fm_solve([LinearConstraint.of({x: 1}, 0), LinearConstraint.of({x: -1}, -1)])
        assert result.verdict is FmVerdict.UNSAT


class TestBuiltinSat:
    def test_satisfiable_with_checked_model(self):
        phi = mk_and(cmp(GT, x, num(0)), cmp(LT, x, num(2)))
        result = builtin_sat(phi)
        assert result.is_sat
        assert result.model[x] == 1

    def test_integer_gap_is_unsat(self):
        assert builtin_sat(mk_and(cmp(GT, x, num(0)), cmp(LT, x, num(1)))).is_unsat

    def test_gcd_tightening(self):
        assert builtin_sat(cmp(EQ_INT, cmp(TIMES, num(2), x), num(1))).is_unsat

    def test_disequality_is_split(self):
        assert builtin_sat(cmp(NEQ_INT, x, x)).is_unsat
        phi = mk_and(mk_and(cmp(GE, x, num(0)), cmp(LE, x, num(1))), cmp(NEQ_INT, x, num(0)))
        result = builtin_sat(phi)
        assert result.is_sat and result.model[x] == 1

    def test_disjunction(self):
        phi = mk_and(mk_or(cmp(LT, x, num(-5)), cmp(GT, x, num(5))), cmp(GE, x, num(0)))
        result = builtin_sat(phi)
        assert result.is_sat and result.model[x] > 5

    def test_boolean_variables(self):
        assert builtin_sat(mk_and(b, mk_not(b))).is_unsat
        assert builtin_sat(mk_or(b, cmp(LE, x, num(0)))).is_sat

    def test_non_linear_atom_is_unknown(self):
        result = builtin_sat(cmp(EQ_INT, cmp(TIMES, x, y), num(1)))
        assert result.verdict is Verdict.UNKNOWN
        assert "non-linear" in result.reason

    def test_ground_constraints(self):
        assert builtin_sat(cmp(EQ_INT, cmp(PLUS, num(1), num(1)), num(2))).is_sat
        assert builtin_sat(FALSE).is_unsat
        assert builtin_sat(cmp(EQ_INT, cmp(DIV, num(1), num(0)), num(0))).is_unknown


BOX = range(-8, 9)


@settings(max_examples=200, deadline=None)
@given(unit_linear_constraints())
def test_builtin_sat_agrees_with_enumeration_over_a_box(case):
    int_vars, phi = case
    box = conjunction([atom for v in int_vars for atom in (cmp(GE, v, num(BOX[0])), cmp(LE, v, num(BOX[-1])))])
    boxed = mk_and(box, phi)
    expected = any(
        eval_under(boxed, dict(zip(int_vars, point))) is True
        for point in itertools.product(BOX, repeat=len(int_vars))
    )
    result = builtin_sat(boxed)
    if result.is_unknown:
        return
    assert result.is_sat == expected
    if result.is_sat:
        assert eval_under(boxed, {v: result.model[v] for v in int_vars}) is True


class TestQuantifiers:
    def test_eliminating_an_equated_variable(self):
        assert builtin_equiv(TRUE, cmp(EQ_INT, z, y), [], [z]) is EquivVerdict.EQUIV

    def test_projection_keeps_free_bounds(self):
        phi = mk_and(cmp(LE, x, z), cmp(LE, z, num(3)))
        projected = eliminate_exists(phi, [z])
        assert builtin_equiv(projected, cmp(LE, x, num(3)), [], []) is EquivVerdict.EQUIV

    def test_equivalence_over_the_integers(self):
        assert builtin_equiv(cmp(LE, x, num(0)), cmp(LT, x, num(1)), [], []) is EquivVerdict.EQUIV
        assert builtin_equiv(cmp(LE, x, num(0)), cmp(LT, x, num(0)), [], []) is EquivVerdict.NOT_EQUIV

    def test_non_unit_projection_is_unknown(self):
        phi = cmp(EQ_INT, cmp(TIMES, num(2), z), x)
        assert eliminate_exists(phi, [z]) is None


class TestSimplify:
    def test_neutral_elements_and_double_negation(self):
        atom = cmp(LE, x, num(0))
        assert simplify(mk_and(TRUE, mk_and(atom, TRUE))) == atom
        assert simplify(mk_not(mk_not(atom))) == atom
        assert simplify(mk_or(atom, TRUE)) == TRUE
        assert simplify(mk_and(atom, FALSE)) == FALSE


class TestConstraintSolver:
    def test_results_are_cached(self):
        solver = ConstraintSolver(SolverConfig(fallback=False))
        phi = cmp(GT, x, num(0))
        first = solver.is_satisfiable(phi)
        second = solver.is_satisfiable(phi)
        assert first == second
        assert solver.stats["cache_hits"] == 1
        assert solver.stats["builtin_sat"] == 1

    def test_missing_external_solver_keeps_builtin_answer(self):
        config = SolverConfig(command="no-such-solver-binary -in", fallback=True)
        with ConstraintSolver(config) as solver:
            result = solver.is_satisfiable(cmp(EQ_INT, cmp(TIMES, x, y), num(1)))
        assert result.is_unknown

    def test_selecting_a_missing_external_solver_fails(self):
        with pytest.raises(SolverUnavailable):
            ConstraintSolver(SolverConfig(backend="external", command="no-such-solver-binary -in"))

    def test_equivalence_is_cached(self):
        solver = ConstraintSolver(SolverConfig(fallback=False))
        args = (cmp(LE, x, num(0)), cmp(LT, x, num(1)), (), ())
        assert solver.check_equiv(*args) is EquivVerdict.EQUIV
        assert solver.check_equiv(*args) is EquivVerdict.EQUIV
        assert solver.stats["cache_hits"] == 1

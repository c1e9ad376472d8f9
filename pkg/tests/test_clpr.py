"""Rational constraint solver: exact linear equations, inequality
consistency, residues, and randomized equivalence against an
independent Gaussian elimination."""

import random
from fractions import Fraction

import pytest

from helpers import (random_linear_system, run_query,
                     solve_linear_via_engine)
from prolite.errors import IneqCapExceeded, NonLinearUnsupported, TypeMix


def test_single_equation_binds_exactly():
    sols = run_query("", "{X = 1 rdiv 3}")
    assert sols[0].bindings["X"] == Fraction(1, 3)


def test_two_by_two_system():
    sols = run_query("", "{A + 3 = 2 * (B - 3)}, {B + 2 = (A - 2) + 1}")
    assert sols[0].bindings["A"] == 15
    assert sols[0].bindings["B"] == 12


def test_incremental_posting_binds_when_determined():
    sols = run_query("", "{X + Y = 10}, {X - Y = 4}")
    assert sols[0].bindings["X"] == 7
    assert sols[0].bindings["Y"] == 3


def test_division_yields_exact_rationals():
    sols = run_query("", "{3 * X = 1}, {Y = X + 1 rdiv 6}")
    assert sols[0].bindings["X"] == Fraction(1, 3)
    assert sols[0].bindings["Y"] == Fraction(1, 2)


def test_underdetermined_answer_is_flagged():
    sols = run_query("", "{X + Y = 3}")
    assert sols and "X" in sols[0].underdetermined
    assert "Y" in sols[0].underdetermined


def test_inconsistent_equations_fail():
    assert run_query("", "{X + Y = 3}, {X + Y = 4}") == []


def test_redundant_equation_succeeds():
    sols = run_query("", "{X + Y = 3}, {2 * X + 2 * Y = 6}")
    assert len(sols) == 1


def test_inequalities_consistent_path():
    sols = run_query("", "{X >= 1}, {X =< 5}, {X = 4}")
    assert sols[0].bindings["X"] == 4


def test_inequalities_inconsistent_by_elimination():
    assert run_query("", "{X + Y =< 4}, {X >= 3}, {Y >= 2}") == []


def test_strict_inequality():
    assert run_query("", "{X < 2}, {X > 2}") == []
    assert run_query("", "{X < 2}, {X = 2}") == []
    assert len(run_query("", "{X < 2}, {X = 1}")) == 1


def test_ground_check():
    assert len(run_query("", "{2 + 2 = 4}")) == 1
    assert run_query("", "{2 + 2 = 5}") == []


def test_nonlinear_product_rejected():
    with pytest.raises(NonLinearUnsupported):
        run_query("", "{X * Y = 4}")


def test_division_by_variable_rejected():
    with pytest.raises(NonLinearUnsupported):
        run_query("", "{1 / X = 2}")


def test_mixing_fd_var_into_rational_constraint_rejected():
    with pytest.raises(TypeMix):
        run_query("", "X #>= 0, X #=< 9, {X + Y = 3}")


def test_inequality_cap():
    goals = ", ".join(f"{{X + {i} * Y >= {i}}}" for i in range(14))
    with pytest.raises(IneqCapExceeded):
        run_query("", goals)


def test_backtracking_discards_posted_rows():
    sols = run_query("", "( {X = 1}, fail ; {X = 2} )")
    assert [s.bindings["X"] for s in sols] == [2]


def test_rational_route_chosen_for_decimals():
    sols = run_query("", "{X = 0.5 + 0.25}")
    assert sols[0].bindings["X"] == Fraction(3, 4)


def test_random_equivalence_with_gaussian_oracle():
    rng = random.Random(77)
    for _ in range(60):
        a, b, expected = random_linear_system(rng)
        assert solve_linear_via_engine(a, b) == expected, (a, b)

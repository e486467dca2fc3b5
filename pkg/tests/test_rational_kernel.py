"""Тесты точной арифметики и многочленов"""
from fractions import Fraction

import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from polytopes.errors import ValidationError
from polytopes.rational_kernel import (
    MultiPoly,
    determinant,
    format_rational,
    inverse,
    mat_vec,
    nullspace,
    poly_determinant,
    primitive,
    rank,
    rref,
    solve_linear,
    to_rational,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)
small_ints = st.integers(min_value=-6, max_value=6)


def test_to_rational_parses_strings():
    """Строки p/q, целые и юникодный минус"""
    assert to_rational("3/6") == Fraction(1, 2)
    assert to_rational("−2") == Fraction(-2)
    assert to_rational(7) == Fraction(7)


@pytest.mark.parametrize("value", [0.5, True, None, "abc", "1/0"])
def test_to_rational_rejects(value):
    """Float и мусор не принимаются"""
    with pytest.raises(ValidationError):
        to_rational(value)


def test_format_rational():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 30)) == "-1/30"


def test_primitive():
    assert primitive([2, -4, 6]) == (1, -2, 3)
    with pytest.raises(ValidationError):
        primitive([0, 0])


def test_rref_and_rank():
    rows, pivots = rref([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert pivots == [0, 1]
    assert rows[0] == [1, 0, 1]
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([], 3) == 0


def test_solve_linear_infeasible_is_none():
    """Несовместная система - значение None, не исключение"""
    assert solve_linear([[1, 1], [1, 1]], [1, 2]) is None


def test_solve_linear_nullspace():
    solved = solve_linear([[1, 1, 1]], [3])
    assert solved is not None
    assert sum(solved.solution) == 3
    assert len(solved.nullspace) == 2
    for v in solved.nullspace:
        assert sum(v) == 0


def test_determinant_and_inverse():
    matrix = [[2, 1], [7, 4]]
    assert determinant(matrix) == 1
    inv = inverse(matrix)
    assert inv == [[4, -1], [-7, 2]]
    with pytest.raises(ValidationError):
        inverse([[1, 2], [2, 4]])


@given(st.lists(st.lists(rationals, min_size=3, max_size=3), min_size=1, max_size=4))
@hyp_settings(max_examples=60, deadline=None)
def test_nullspace_vectors_are_annihilated(matrix):
    """A·v = 0 для каждого вектора базиса ядра, и rank + nullity = n"""
    kernel = nullspace(matrix, 3)
    for v in kernel:
        assert all(x == 0 for x in mat_vec(matrix, v))
    assert rank(matrix, 3) + len(kernel) == 3


@given(st.lists(st.lists(rationals, min_size=3, max_size=3), min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
@hyp_settings(max_examples=60, deadline=None)
def test_solve_linear_round_trip(matrix, x):
    """Решение воспроизводит правую часть"""
    rhs = mat_vec(matrix, x)
    solved = solve_linear(matrix, rhs)
    assert solved is not None
    assert mat_vec(matrix, solved.solution) == rhs


@given(rationals, rationals, rationals)
def test_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    if b != 0:
        assert (a / b) * b == a


def _poly(coefficients):
    p = MultiPoly.zero(2)
    for (i, j), c in coefficients.items():
        p = p + MultiPoly(2, {(i, j): c})
    return p


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), rationals, max_size=5).map(_poly)


@given(polys, polys, rationals, rationals)
@hyp_settings(max_examples=80, deadline=None)
def test_evaluation_is_a_ring_homomorphism(p, q, x, y):
    point = (x, y)
    assert (p + q).evaluate(point) == p.evaluate(point) + q.evaluate(point)
    assert (p * q).evaluate(point) == p.evaluate(point) * q.evaluate(point)


def test_multipoly_basics():
    k1 = MultiPoly.variable(2, 0)
    k2 = MultiPoly.variable(2, 1)
    p = (k1 + k2) * (k1 - k2)
    assert p == k1 * k1 - k2 * k2
    assert p.degree() == 2
    assert p.is_homogeneous(2)
    assert p.partial(0) == 2 * k1
    assert (p - p).is_zero()
    assert p.specialize({1: 1}) == k1 * k1 - 1
    assert MultiPoly.linear([1, -1], 2).evaluate([3, 1]) == 4


def test_poly_determinant():
    """det [[κ₁, 1], [1, κ₂]] = κ₁κ₂ − 1"""
    k1 = MultiPoly.variable(2, 0)
    k2 = MultiPoly.variable(2, 1)
    one = MultiPoly.constant(2, 1)
    assert poly_determinant([[k1, one], [one, k2]]) == k1 * k2 - 1

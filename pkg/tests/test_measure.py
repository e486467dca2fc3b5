"""Тесты объема, моментов и барицентров остовов"""
from fractions import Fraction
from itertools import product as cartesian

import pytest
import sympy

from polytopes.constructions import simplex, trapezoid
from polytopes.errors import DimensionError
from polytopes.measure import (
    barycenter_table,
    center_of_mass,
    face_measure,
    integrate_monomial,
    moment_poly,
    simplex_monomial_integral,
    skeleton_barycenter,
    volume,
    volume_poly,
)
from polytopes.rational_kernel import MultiPoly

x, y = sympy.symbols("x y")


def _fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _exponents(k: int, max_degree: int):
    for exponents in cartesian(range(max_degree + 1), repeat=k):
        if sum(exponents) <= max_degree:
            yield exponents


def test_volume_poly_of_triangle():
    """V(κ) = (κ₁ + κ₂ + κ₃)² / 2"""
    k = [MultiPoly.variable(3, i) for i in range(3)]
    s = k[0] + k[1] + k[2]
    poly = volume_poly(simplex(2))
    assert poly == s * s / 2
    assert poly.is_homogeneous(2)


def test_moment_poly_of_triangle():
    """∫x по треугольнику x ≥ −κ₁, y ≥ −κ₂, x + y ≤ κ₃"""
    poly = moment_poly(simplex(2), (1, 0))
    for kappa in [(0, 0, 1), (1, 2, 3), (Fraction(1, 2), -1, 4), (-3, 5, 7)]:
        s = sum(Fraction(c) for c in kappa)
        expected = s * s / 2 * (Fraction(kappa[1]) + kappa[2] - 2 * Fraction(kappa[0])) / 3
        assert poly.evaluate(kappa) == expected


def test_trapezoid_barycenters():
    """B₀ = (3/4, 3/4), B₁ = (4/5, 4/5), B₂ = (7/9, 7/9)"""
    trap = trapezoid()
    table = barycenter_table(trap)
    assert table[0] == (Fraction(3, 4), Fraction(3, 4))
    assert table[1] == (Fraction(4, 5), Fraction(4, 5))
    assert table[2] == (Fraction(7, 9), Fraction(7, 9))
    assert center_of_mass(trap) == table[2]
    assert volume(trap) == Fraction(3, 2)
    assert volume_poly(trap).evaluate(trap.support) == Fraction(3, 2)


def test_triangle_skeleton_barycenters_coincide():
    triangle = simplex(2)
    for k in range(3):
        assert skeleton_barycenter(triangle, k) == (Fraction(1, 3), Fraction(1, 3))


def test_skeleton_dimension_out_of_range():
    with pytest.raises(DimensionError):
        skeleton_barycenter(trapezoid(), 3)


def test_volume_partials_are_facet_volumes():
    """∂V/∂κᵢ равен решеточной длине i-й фасеты"""
    trap = trapezoid()
    poly = volume_poly(trap)
    lengths = [face_measure(trap, trap.face({i})).volume for i in range(trap.n_facets)]
    assert lengths == [1, 1, 2, 1]
    for i, length in enumerate(lengths):
        assert poly.partial(i).evaluate(trap.support) == length


@pytest.mark.parametrize("size", [1, 2, Fraction(3, 2)])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_monomial_integrals_match_closed_form(k, size):
    """∫ x^i по Δ_k^λ для всех |i| ≤ 4"""
    body = simplex(k, size)
    for exponents in _exponents(k, 4):
        assert integrate_monomial(body, exponents) == simplex_monomial_integral(exponents, size)


@pytest.mark.parametrize("i,j", list(_exponents(2, 3)))
def test_closed_form_against_sympy(i, j):
    expected = sympy.integrate(x**i * y**j, (y, 0, 2 - x), (x, 0, 2))
    assert simplex_monomial_integral((i, j), 2) == _fraction(expected)


@pytest.mark.parametrize("i,j", list(_exponents(2, 3)))
def test_trapezoid_monomials_against_sympy(i, j):
    """Трапеция 1 ≤ x + y ≤ 2 в первом квадранте"""
    inner = sympy.integrate(x**i * y**j, (y, 1 - x, 2 - x), (x, 0, 1))
    outer = sympy.integrate(x**i * y**j, (y, 0, 2 - x), (x, 1, 2))
    assert integrate_monomial(trapezoid(), (i, j)) == _fraction(inner + outer)

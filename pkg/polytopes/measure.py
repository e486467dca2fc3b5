"""Объем, H-моменты, центр масс и барицентры остовов"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, List, Sequence, Tuple

import structlog

from polytopes.errors import DimensionError, EmptyPolytopeError, ValidationError
from polytopes.polytope_core import Face, HPolytope, Point, require_smooth
from polytopes.rational_kernel import (
    MultiPoly,
    Rational,
    determinant,
    dot,
    inverse,
    poly_determinant,
    to_rational,
)

logger = structlog.get_logger()


@dataclass(frozen=True)
class ParamVertex:
    """Вершина как линейная функция от κ внутри камеры"""

    basis: Tuple[int, ...]
    forms: Tuple[Tuple[Fraction, ...], ...]

    def evaluate(self, support: Sequence[Rational]) -> Point:
        kappa = [to_rational(k) for k in support]
        return tuple(dot(row, kappa) for row in self.forms)

    def coordinate(self, axis: int) -> MultiPoly:
        return MultiPoly.linear(self.forms[axis])


@dataclass(frozen=True)
class Triangulation:
    """Симплексы (номера вершин) и их ориентации при базовом κ"""

    simplices: Tuple[Tuple[int, ...], ...]
    signs: Tuple[int, ...]
    vertices: Tuple[ParamVertex, ...]


def parametrize_vertices(polytope: HPolytope) -> Tuple[ParamVertex, ...]:
    """x(κ) = A_J⁻¹ κ_J для каждой вершины"""
    result = []
    for v in polytope.vertices:
        inv = inverse([polytope.conormals[i] for i in v.basis])
        forms = []
        for row in inv:
            coefficients = [Fraction(0)] * polytope.n_facets
            for position, facet in enumerate(v.basis):
                coefficients[facet] = row[position]
            forms.append(tuple(coefficients))
        result.append(ParamVertex(v.basis, tuple(forms)))
    return tuple(result)


def pulling_simplices(polytope: HPolytope, face: Face) -> List[Tuple[int, ...]]:
    """
    Вытягивающая триангуляция грани

    Якорь - лексикографически наименьшая вершина грани; рекурсия по фасетам
    грани, не содержащим якорь.
    """
    if face.dimension == 0:
        return [face.vertex_ids]
    anchor = face.vertex_ids[0]
    result = []
    for sub in polytope.subfaces(face):
        if anchor in sub.vertex_ids:
            continue
        for simplex in pulling_simplices(polytope, sub):
            result.append((anchor,) + simplex)
    return result


def _simplex_determinant(points: Sequence[Point]) -> Fraction:
    base = points[0]
    return determinant([[a - b for a, b in zip(p, base)] for p in points[1:]])


@lru_cache(maxsize=256)
def triangulate(polytope: HPolytope) -> Triangulation:
    """Триангуляция всего многогранника со знаками ориентации"""
    require_smooth(polytope)
    whole = polytope.lattice[frozenset()]
    simplices = tuple(pulling_simplices(polytope, whole))
    signs = []
    for simplex in simplices:
        det = _simplex_determinant([polytope.vertices[i].point for i in simplex])
        if det == 0:
            raise EmptyPolytopeError("Degenerate simplex in triangulation", {"simplex": list(simplex)})
        signs.append(1 if det > 0 else -1)
    logger.debug("Polytope triangulated", name=polytope.name, simplices=len(simplices))
    return Triangulation(simplices, tuple(signs), parametrize_vertices(polytope))


@lru_cache(maxsize=256)
def _oriented_determinants(polytope: HPolytope) -> Tuple[MultiPoly, ...]:
    tri = triangulate(polytope)
    n = polytope.dim
    result = []
    for simplex, sign in zip(tri.simplices, tri.signs):
        base = tri.vertices[simplex[0]]
        rows = []
        for vid in simplex[1:]:
            other = tri.vertices[vid]
            rows.append([other.coordinate(axis) - base.coordinate(axis) for axis in range(n)])
        result.append(poly_determinant(rows) * sign)
    return tuple(result)


@lru_cache(maxsize=256)
def volume_poly(polytope: HPolytope) -> MultiPoly:
    """V(κ) на камере, однородный многочлен степени n"""
    n = polytope.dim
    total = MultiPoly.zero(polytope.n_facets)
    for det in _oriented_determinants(polytope):
        total = total + det
    return total / factorial(n)


@lru_cache(maxsize=256)
def coordinate_moment_polys(polytope: HPolytope) -> Tuple[MultiPoly, ...]:
    """∫_Δ x_j как многочлены от κ, j = 1..n"""
    tri = triangulate(polytope)
    n = polytope.dim
    dets = _oriented_determinants(polytope)
    moments = []
    for axis in range(n):
        total = MultiPoly.zero(polytope.n_facets)
        for simplex, det in zip(tri.simplices, dets):
            vertex_sum = MultiPoly.zero(polytope.n_facets)
            for vid in simplex:
                vertex_sum = vertex_sum + tri.vertices[vid].coordinate(axis)
            total = total + det * vertex_sum
        moments.append(total / (factorial(n) * (n + 1)))
    return tuple(moments)


def moment_poly(polytope: HPolytope, functional: Sequence[int]) -> MultiPoly:
    """μ_H(κ) = ∫_Δ ⟨H, x⟩"""
    if len(functional) != polytope.dim:
        raise ValidationError("Functional dimension mismatch", {"dim": polytope.dim, "functional": len(functional)})
    total = MultiPoly.zero(polytope.n_facets)
    for h, moment in zip(functional, coordinate_moment_polys(polytope)):
        if h != 0:
            total = total + moment * h
    return total


def _numeric_simplices(polytope: HPolytope) -> List[Tuple[Fraction, Tuple[Point, ...]]]:
    tri = triangulate(polytope)
    n = polytope.dim
    result = []
    for simplex in tri.simplices:
        points = tuple(polytope.vertices[i].point for i in simplex)
        result.append((abs(_simplex_determinant(points)) / factorial(n), points))
    return result


def volume(polytope: HPolytope) -> Fraction:
    return sum((vol for vol, _ in _numeric_simplices(polytope)), Fraction(0))


def center_of_mass(polytope: HPolytope) -> Point:
    """
    Центр масс при базовом κ

    Raises:
        EmptyPolytopeError: нулевой объем
    """
    measure = face_measure(polytope, polytope.lattice[frozenset()])
    if measure.volume == 0:
        raise EmptyPolytopeError("Zero volume")
    return tuple(m / measure.volume for m in measure.moment)


@dataclass(frozen=True)
class FaceMeasure:
    """Решеточный объем грани и ее момент ∫_f x"""

    volume: Fraction
    moment: Point

    @property
    def barycenter(self) -> Point:
        return tuple(m / self.volume for m in self.moment)


def face_measure(polytope: HPolytope, face: Face) -> FaceMeasure:
    """
    Мера на грани, индуцированная целочисленной решеткой ее направления

    Координаты грани: yⱼ = −⟨ηⱼ, x⟩ по фасетам базиса опорной вершины,
    не содержащим грань; для гладкого многогранника это решеточный базис.
    """
    if face.dimension == 0:
        point = polytope.vertices[face.vertex_ids[0]].point
        return FaceMeasure(Fraction(1), point)
    anchor = polytope.vertices[face.vertex_ids[0]]
    frame = [polytope.conormals[j] for j in anchor.basis if j not in face.index_set]
    k = face.dimension
    total_volume = Fraction(0)
    moment = [Fraction(0)] * polytope.dim
    for simplex in pulling_simplices(polytope, face):
        points = [polytope.vertices[i].point for i in simplex]
        coords = [tuple(-dot(eta, p) for eta in frame) for p in points]
        vol = abs(_simplex_determinant(coords)) / factorial(k)
        total_volume += vol
        for axis in range(polytope.dim):
            moment[axis] += vol * sum(p[axis] for p in points) / (k + 1)
    return FaceMeasure(total_volume, tuple(moment))


def skeleton_barycenter(polytope: HPolytope, k: int) -> Point:
    """B_k: центр масс объединения k-мерных граней"""
    if not 0 <= k <= polytope.dim:
        raise DimensionError("Skeleton dimension out of range", {"k": k, "dim": polytope.dim})
    total = Fraction(0)
    moment = [Fraction(0)] * polytope.dim
    for f in polytope.faces_of_dimension(k):
        measure = face_measure(polytope, f)
        total += measure.volume
        moment = [a + b for a, b in zip(moment, measure.moment)]
    return tuple(m / total for m in moment)


def integrate_monomial(polytope: HPolytope, exponents: Sequence[int]) -> Fraction:
    """
    ∫_Δ x^α по триангуляции

    На симплексе с вершинами p₀..pₙ: x = Σ λᵢpᵢ и
    ∫ λ^m = n!·vol·Π mᵢ! / (|m| + n)!.
    """
    n = polytope.dim
    if len(exponents) != n:
        raise ValidationError("Exponent dimension mismatch", {"dim": n, "exponents": len(exponents)})
    total = Fraction(0)
    for vol, points in _numeric_simplices(polytope):
        integrand = MultiPoly.constant(n + 1, 1)
        for axis, power in enumerate(exponents):
            coordinate = MultiPoly.linear([p[axis] for p in points])
            for _ in range(power):
                integrand = integrand * coordinate
        for multi, coefficient in integrand.terms.items():
            weight = Fraction(factorial(n))
            for m in multi:
                weight *= factorial(m)
            total += coefficient * vol * weight / factorial(sum(multi) + n)
    return total


def simplex_monomial_integral(exponents: Sequence[int], size: Rational = 1) -> Fraction:
    """Замкнутая формула ∫_{Δ_k^λ} x^i = i₁!···i_k! λ^{|i|+k} / (|i|+k)!"""
    lam = to_rational(size)
    k = len(exponents)
    degree = sum(exponents)
    numerator = Fraction(1)
    for i in exponents:
        numerator *= factorial(i)
    return numerator * lam ** (degree + k) / factorial(degree + k)


def barycenter_table(polytope: HPolytope) -> Dict[int, Point]:
    return {k: skeleton_barycenter(polytope, k) for k in range(polytope.dim + 1)}

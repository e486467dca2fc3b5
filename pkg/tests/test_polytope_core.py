"""Тесты полупространственной модели, граней и решеточной эквивалентности"""
from fractions import Fraction

import pytest

from polytopes.constructions import box, simplex, trapezoid
from polytopes.errors import (
    EmptyPolytopeError,
    NonSimpleVertexError,
    NonSmoothError,
    RedundantHalfspaceError,
    UnboundedPolytopeError,
    ValidationError,
)
from polytopes.polytope_core import (
    HPolytope,
    chamber_radius,
    face_lattice,
    face_polytope,
    find_lattice_equivalence,
    in_same_chamber,
    is_simple,
    is_smooth,
    lattice_equivalence,
    require_smooth,
    translate,
)


def test_simplex_vertices_and_faces():
    """Δ₂: три вершины, три ребра, сам треугольник"""
    triangle = simplex(2)
    points = sorted(v.point for v in triangle.vertices)
    assert points == [(0, 0), (0, 1), (1, 0)]
    assert len(face_lattice(triangle)) == 7
    assert len(triangle.faces_of_dimension(1)) == 3
    assert is_smooth(triangle)


def test_face_of_disjoint_facets_is_none():
    """У трапеции фасеты x+y ≤ 2 и x+y ≥ 1 не пересекаются"""
    assert trapezoid().face({2, 3}) is None
    assert trapezoid().face({0, 2}).dimension == 0


def test_neighbors():
    assert trapezoid().neighbors(2) == [0, 1]


def test_name_is_read_only():
    polytope = HPolytope([(-1, 0), (0, -1), (1, 1)], [0, 0, 1], name="triangle")
    assert polytope.name == "triangle"
    assert polytope.with_support([0, 0, 2]).name == "triangle"
    with pytest.raises(AttributeError):
        polytope.name = "renamed"


def test_non_smooth_triangle():
    """Вершина (0, 1) с конормалями (−1,0), (1,2) имеет det = −2"""
    triangle = HPolytope([(-1, 0), (0, -1), (1, 2)], [0, 0, 2])
    assert not is_smooth(triangle)
    with pytest.raises(NonSmoothError) as exc:
        require_smooth(triangle)
    assert exc.value.details["determinant"] == "-2"


def test_unbounded():
    with pytest.raises(UnboundedPolytopeError):
        HPolytope([(-1, 0), (0, -1)], [0, 0])


def test_empty():
    with pytest.raises(EmptyPolytopeError):
        HPolytope([(-1, 0), (0, -1), (1, 1)], [0, 0, -1])


def test_redundant_halfspace_named():
    with pytest.raises(RedundantHalfspaceError) as exc:
        HPolytope([(-1, 0), (1, 0), (0, -1), (0, 1), (1, 1)], [0, 1, 0, 1, 5])
    assert exc.value.details["facet"] == 4


def test_non_primitive_conormal():
    with pytest.raises(ValidationError):
        HPolytope([(-2, 0), (0, -1), (1, 1)], [0, 0, 1])


def test_non_simple_pyramid():
    """Вершина квадратной пирамиды лежит на четырех фасетах"""
    pyramid = HPolytope(
        [(0, 0, -1), (1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)],
        [0, 1, 1, 1, 1],
    )
    assert not is_simple(pyramid)
    assert not is_smooth(pyramid)
    with pytest.raises(NonSimpleVertexError):
        pyramid.vertices


def test_chamber():
    triangle = simplex(2)
    assert in_same_chamber(triangle, [0, 0, 3])
    assert in_same_chamber(triangle, [1, 0, 1])
    assert not in_same_chamber(triangle, [0, 0, -1])
    assert all(r > 0 for r in chamber_radius(trapezoid()))


def test_translate_is_lattice_equivalent():
    moved = translate(simplex(2), [1, 2])
    assert moved.support == (Fraction(-1), Fraction(-2), Fraction(4))
    found = lattice_equivalence(simplex(2), moved, [0, 1, 2])
    assert found is not None
    assert found.matrix == ((1, 0), (0, 1))
    assert found.shift == (1, 2)


def test_find_lattice_equivalence_permuted_facets():
    permuted = HPolytope([(1, 1), (-1, 0), (0, -1)], [1, 0, 0])
    found = find_lattice_equivalence(simplex(2), permuted)
    assert found is not None
    facet_map, _ = found
    assert sorted(facet_map) == [0, 1, 2]


def test_find_lattice_equivalence_rejects_different_area():
    assert find_lattice_equivalence(trapezoid(), box(2)) is None


def test_face_polytope_of_slanted_facet():
    """Грань x+y+z = 1 симплекса Δ₃ - гладкий решеточный треугольник"""
    presentation = face_polytope(simplex(3), [3])
    face = presentation.polytope
    assert face.dim == 2
    assert face.n_facets == 3
    assert is_smooth(face)
    assert sorted(presentation.facet_map) == [0, 1, 2]
    assert find_lattice_equivalence(face, simplex(2)) is not None

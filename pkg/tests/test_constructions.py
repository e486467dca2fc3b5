"""Тесты конструкций: расслоения, расширения, раздутия и пространства массово линейных функций"""
from fractions import Fraction

import pytest

from polytopes.constructions import (
    BundleSpec121,
    BundleSpecD2Polygon,
    area_polynomial,
    blowdown,
    blowup,
    blowup_slack,
    box,
    bundle_121,
    bundle_D2_polygon,
    double_expansion,
    edge_blowup_preserves,
    expansion,
    face_index_set,
    make_yk,
    minimal_family_a3,
    minimal_family_a3_functional,
    minimal_family_a3_twists,
    minimal_family_b,
    minimal_family_b_functional,
    ml_space_121,
    ml_space_D2_polygon,
    ml_space_Yk,
    polygon_blowup_chain,
    product,
    segment,
    simplex,
    trapezoid,
    vertex_blowup_preserves,
)
from polytopes.errors import BlowupError, ChamberError, FaceError, ValidationError
from polytopes.masslinear import equivalence_classes, is_inessential, mass_linear_test
from polytopes.measure import center_of_mass, volume
from polytopes.polytope_core import find_lattice_equivalence, is_smooth
from polytopes.rational_kernel import MultiPoly, dot, rank
from polytopes.recognize_classify import blowup_tag, classify4d
from polytopes.suite import D2_TWISTS, integral_functional

EXAMPLE_KAPPA = (0, 0, 0, 1, 0, 2)


def example_polytope():
    return make_yk(3, (1, 1, 0), EXAMPLE_KAPPA)


def _in_span(vectors, vector) -> bool:
    width = len(vector)
    return rank(list(vectors) + [vector], width) == rank(list(vectors), width)


def test_simplex_and_product():
    assert simplex(2).conormals == ((-1, 0), (0, -1), (1, 1))
    assert product(segment(), segment()) == box(2)
    assert is_smooth(product(simplex(2), segment(3)))


def test_yk_combinatorics():
    """Δ_k × Δ₁: 2(k+1) вершин; при a = 0 это произведение"""
    for k, a in [(2, (1, 0)), (3, (1, 1, 0)), (3, (2, -1, 1))]:
        kappa = (0,) * k + (1, 0, 5)
        assert len(make_yk(k, a, kappa).vertices) == 2 * (k + 1)
    assert make_yk(2, (0, 0), (0, 0, 1, 0, 3)) == product(simplex(2), segment(3))


def test_yk_outside_chamber():
    with pytest.raises(ChamberError) as exc:
        make_yk(2, (3, 0), (0, 0, 1, 0, 2))
    assert exc.value.code == "outside_chamber"


def test_expansion_of_segment_is_triangle():
    assert expansion(segment(), 1) == simplex(2)


def test_double_expansion_of_trapezoid_is_example_bundle():
    """Двойное расширение трапеции вдоль параллельных ребер"""
    expanded = double_expansion(trapezoid(), 2, 3)
    assert volume(expanded) == Fraction(1, 4)
    assert volume(example_polytope()) == Fraction(1, 4)
    assert find_lattice_equivalence(expanded, example_polytope()) is not None


def test_expansion_base_facets_are_equivalent():
    expanded = expansion(trapezoid(), 2, fold=2)
    assert expanded.labels[-3:] == ("B1", "B2", "B3")
    classes = equivalence_classes(expanded)
    assert classes.equivalent(3, 4)
    assert classes.equivalent(4, 5)


def test_bundle_121_product_case():
    """d = a₁ = 0: Δ₁ × Y(2, (a₂, a₃))"""
    polytope = bundle_121(BundleSpec121((0, 1, 2), 0, (1, 0, 0, 0, 3, 0, 14)))
    assert len(polytope.vertices) == 12
    segment_factor = polytope.face({0})
    assert segment_factor is not None
    assert polytope.face({0, 1}) is None


def test_bundle_d2_trivial_is_product():
    base = simplex(2)
    polytope = bundle_D2_polygon(BundleSpecD2Polygon(base, ((0, 0),) * 3))
    assert find_lattice_equivalence(polytope, product(simplex(2), simplex(2))) is not None


def test_bundle_d2_rejects_twisted_first_edges():
    with pytest.raises(ValidationError):
        bundle_D2_polygon(BundleSpecD2Polygon(simplex(2), ((1, 0), (0, 0), (0, 0))))


def test_vertex_blowup_of_triangle_has_four_edges():
    blown = blowup(simplex(2), {0, 1})
    assert blown.n_facets == 4
    assert blown.labels[-1] == "E1"
    assert is_smooth(blown)


def test_blowup_errors():
    triangle = simplex(2)
    with pytest.raises(FaceError):
        blowup(triangle, {0})
    limit = blowup_slack(triangle, {0, 1})
    assert limit == 1
    with pytest.raises(BlowupError):
        blowup(triangle, {0, 1}, eps=limit)
    with pytest.raises(FaceError):
        blowup(trapezoid(), {2, 3})


def test_example_blowup_and_blowdown():
    """Раздутие F̄₂₄ ∩ Ḡ₁ и обратное стягивание"""
    base = example_polytope()
    blown = blowup(base, face_index_set(base, ["F2", "F4", "G1"]))
    assert blown.conormals[6] == (1, 0, 1, -1)
    result = blowdown(blown, 6)
    assert result.success
    assert result.polytope == base
    assert result.index_set == (1, 3, 4)
    assert result.eps == blown.support[1] + blown.support[3] + blown.support[4] - blown.support[6]


def _codim2_faces():
    cases = []
    for polytope in (simplex(3), box(3), trapezoid()):
        for dim in range(polytope.dim - 1):
            for face in polytope.faces_of_dimension(dim):
                cases.append((polytope, tuple(sorted(face.index_set))))
    return cases


def test_blowup_blowdown_round_trip():
    """Стягивание последней фасеты восстанавливает исходный многогранник"""
    cases = _codim2_faces()
    assert len(cases) >= 30
    for polytope, members in cases:
        blown = blowup(polytope, members)
        result = blowdown(blown, polytope.n_facets)
        assert result.success, (polytope.name, members)
        assert result.polytope == polytope
        assert members in [c.index_set for c in result.candidates]


def test_equivalent_facets_never_blow_down():
    polytope = example_polytope()
    for facet in range(polytope.n_facets):
        result = blowdown(polytope, facet)
        assert not result.success
        assert result.violation is not None


def test_vertex_blowup_criterion():
    gamma = (1, -1, 0, 0)
    tetrahedron = simplex(3)
    assert vertex_blowup_preserves(tetrahedron, gamma, {0, 1, 2})
    assert not vertex_blowup_preserves(tetrahedron, gamma, {1, 2, 3})
    functional = (-1, 1, 0)
    for members, expected in [({0, 1, 2}, True), ({0, 1, 3}, True), ({0, 2, 3}, False), ({1, 2, 3}, False)]:
        assert mass_linear_test(blowup(tetrahedron, members), functional).verdict == expected


def test_edge_blowup_criterion():
    base = example_polytope()
    gamma = (1, -1, -1, 1, 0, 0)
    assert edge_blowup_preserves(base, gamma, {1, 3, 4})
    with pytest.raises(FaceError):
        edge_blowup_preserves(base, gamma, {4, 5, 0})


def test_ml_space_yk():
    space = ml_space_Yk((1, 2, 3))
    assert space.dimension == 3
    assert len(space.inessential) == 1
    gamma = (1, 1, -1, -1, 0, 0)
    assert _in_span(space.basis, gamma)
    assert not _in_span(space.inessential, gamma)

    trivial = ml_space_Yk((0, 0, 0))
    assert trivial.dimension == 4
    assert len(trivial.inessential) == 4
    assert ml_space_Yk((1, 1, 0)).dimension == 3


def test_ml_space_yk_agrees_with_test():
    polytope = example_polytope()
    space = ml_space_Yk((1, 1, 0))
    for gamma, functional in zip(space.basis, space.functionals):
        report = mass_linear_test(polytope, functional)
        assert report.verdict
        assert report.gamma == gamma


def test_ml_space_121():
    space = ml_space_121((0, 1, 2), 0)
    assert len(space.inessential) < space.dimension
    assert any(any(g[i] != 0 for i in (2, 3, 4)) for g in space.basis)
    twisted = ml_space_121((0, 1, 2), 1)
    assert all(g[0] == 0 and g[1] == 0 for g in twisted.basis)


@pytest.mark.slow
def test_ml_space_121_agrees_with_test():
    polytope = bundle_121(BundleSpec121((0, 1, 2), 0, (1, 0, 0, 0, 3, 0, 14)))
    space = ml_space_121((0, 1, 2), 0)
    for gamma, functional in zip(space.basis, space.functionals):
        report = mass_linear_test(polytope, functional)
        assert report.verdict
        assert report.gamma == gamma


def test_area_polynomial():
    k = [MultiPoly.variable(3, i) for i in range(3)]
    s = k[0] + k[1] + k[2]
    assert area_polynomial(simplex(2)) == s * s / 2


@pytest.mark.parametrize("k", [4, 5, 6])
def test_area_polynomial_vanishes_at_family_ratios(k):
    base = polygon_blowup_chain(k)
    assert base.n_facets == k
    ratios = [0, 0] + [1] * (k - 3) + [2]
    assert area_polynomial(base).evaluate(ratios) == 0


@pytest.mark.parametrize("twist", D2_TWISTS)
def test_d2_over_triangle_has_no_essential_functions(twist):
    """Каждая массово линейная функция расслоения над треугольником несущественна"""
    spec = BundleSpecD2Polygon(simplex(2), ((0, 0), (0, 0), twist), (0, 0, 1, 0, 0, 4))
    bundle = bundle_D2_polygon(spec)
    assert is_smooth(bundle)
    space = ml_space_D2_polygon(spec)
    assert space.basis == space.inessential
    for h in space.functionals:
        if not any(h):
            continue
        functional = integral_functional(h)
        assert mass_linear_test(bundle, functional).verdict
        assert is_inessential(bundle, functional) is not None


def test_d2_twists_cover_chamber():
    assert len(D2_TWISTS) >= 10
    assert all(max(twist) < 4 for twist in D2_TWISTS)


def test_d2_family_has_essential_function():
    spec = BundleSpecD2Polygon(polygon_blowup_chain(4), minimal_family_a3_twists(4))
    space = ml_space_D2_polygon(spec)
    assert space.dimension > len(space.inessential)
    assert (1, 1, -2, 0, 0, 0, 0) in space.basis or _in_span(space.basis, (1, 1, -2, 0, 0, 0, 0))


@pytest.mark.slow
def test_minimal_family_a3():
    polytope = minimal_family_a3(7)
    functional = minimal_family_a3_functional(7)
    assert polytope.name == "minimal_a3(7)"
    assert polytope.n_facets == 7
    report = mass_linear_test(polytope, functional)
    assert report.verdict
    assert report.gamma[:3] == (1, 1, -2)
    assert is_inessential(polytope, functional) is None
    for facet in range(polytope.n_facets):
        assert not blowdown(polytope, facet).success


def _bridging_edges(core, first, second):
    return [
        g for g in range(core.n_facets)
        if g not in (first, second)
        and core.face({g, first}) is not None
        and core.face({g, second}) is not None
    ]


def _expansion_index(g, first, second):
    return g - sum(1 for j in (first, second) if j < g)


@pytest.mark.slow
@pytest.mark.parametrize("N", [5, 6, 8])
def test_minimal_family_b(N):
    polytope = minimal_family_b(N)
    functional = minimal_family_b_functional(N)
    assert polytope.name == f"minimal_b({N})"
    assert polytope.n_facets == N
    assert is_smooth(polytope)
    report = mass_linear_test(polytope, functional)
    assert report.verdict
    assert is_inessential(polytope, functional) is not None
    assert classify4d(polytope, functional).type_tag == "b"
    for facet in range(polytope.n_facets):
        assert not blowdown(polytope, facet).success


@pytest.mark.slow
@pytest.mark.parametrize("N", [6, 8])
def test_minimal_family_b_becomes_essential_after_edge_blowup(N):
    """Раздутие ребра G ∩ B2 ∩ B4 сохраняет γ и делает H существенной"""
    polytope = minimal_family_b(N)
    functional = minimal_family_b_functional(N)
    k = N - 2
    core = polygon_blowup_chain(k)
    first, second = k - 1, k - 3
    bridges = _bridging_edges(core, first, second)
    assert bridges
    g = _expansion_index(bridges[0], first, second)
    face = (g, k - 1, k + 1)
    gamma = (0,) * (k - 2) + (1, -1, -1, 1)
    assert blowup_tag(polytope, gamma, face) == "edge_type_Fij_G"
    blown = blowup(polytope, set(face))
    assert blown.n_facets == N + 1
    assert is_smooth(blown)
    assert mass_linear_test(blown, functional).verdict
    assert is_inessential(blown, functional) is None


def test_minimal_family_b_five_stays_inessential_after_edge_blowup():
    """При N = 5 фасеты B2 и B4 эквивалентны: раздутие ребра не делает H существенной"""
    polytope = minimal_family_b(5)
    functional = minimal_family_b_functional(5)
    face = (0, 2, 4)
    assert blowup_tag(polytope, (0, 1, -1, -1, 1), face) == "edge_type_Fij_G"
    blown = blowup(polytope, set(face))
    assert blown.conormals[-1] == (0, 0, 1, 1)
    assert mass_linear_test(blown, functional).verdict
    assert is_inessential(blown, functional) is not None


@pytest.mark.parametrize(
    "polytope,functional,members,expected",
    [
        (simplex(2), (-1, 1), {0, 1}, True),
        (simplex(2), (-1, 1), {0, 2}, False),
        (simplex(2), (-1, 1), {1, 2}, False),
        (make_yk(2, (0, 0), (0, 0, 1, 0, 3)), (-1, 1, 0), {0, 1, 3}, True),
        (make_yk(2, (0, 0), (0, 0, 1, 0, 3)), (-1, 1, 0), {0, 1, 4}, True),
        (make_yk(2, (0, 0), (0, 0, 1, 0, 3)), (-1, 1, 0), {1, 2, 3}, False),
    ],
)
def test_vertex_blowups(polytope, functional, members, expected):
    """Вершина на всех асимметричных фасетах сохраняет массовую линейность"""
    gamma = mass_linear_test(polytope, functional).gamma
    assert vertex_blowup_preserves(polytope, gamma, members) == expected
    assert mass_linear_test(blowup(polytope, members), functional).verdict == expected


@pytest.mark.parametrize(
    "polytope,functional,members",
    [
        (box(3), (1, 0, 0), {2, 4}),
        (box(3), (1, 0, 0), {2, 5}),
        (box(3), (1, 0, 0), {3, 4}),
        (box(3), (1, 0, 0), {3, 5}),
        (make_yk(2, (0, 0), (0, 0, 1, 0, 3)), (-1, 1, 0), {2, 3}),
        (make_yk(2, (0, 0), (0, 0, 1, 0, 3)), (-1, 1, 0), {2, 4}),
        (simplex(3), (-1, 1, 0), {2, 3}),
    ],
)
def test_symmetric_face_blowups_keep_center_value(polytope, functional, members):
    blown = blowup(polytope, members)
    before = mass_linear_test(polytope, functional)
    after = mass_linear_test(blown, functional)
    assert after.verdict
    assert after.gamma == before.gamma + (0,)
    assert dot(functional, center_of_mass(blown)) == dot(functional, center_of_mass(polytope))

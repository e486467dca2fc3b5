"""Тесты распознавателей, классификации и планировщика раздутий"""
from fractions import Fraction

import pytest

from polytopes.constructions import (
    blowup,
    box,
    double_expansion,
    expansion,
    make_yk,
    polygon_blowup_chain,
    simplex,
    trapezoid,
)
from polytopes.errors import DimensionError, NotMassLinearError, ValidationError
from polytopes.masslinear import is_inessential, mass_linear_test
from polytopes.measure import volume
from polytopes.polytope_core import find_lattice_equivalence
from polytopes.recognize_classify import (
    blowup_tag,
    classify4d,
    essential_blowup_planner,
    recognize_bundle_over_segment,
    recognize_bundles_over_segment,
    recognize_double_expansion,
    recognize_expansion,
    recognize_thm_type,
    replay_trace,
)

EXAMPLE_H = (0, 2, 2, 0)
EXAMPLE_GAMMA = (1, -1, -1, 1, 0, 0)


def example_polytope():
    return make_yk(3, (1, 1, 0), (0, 0, 0, 1, 0, 2))


def test_recognize_yk():
    polytope = example_polytope()
    certificate = recognize_bundle_over_segment(polytope)
    assert certificate.family == "Yk"
    assert certificate.parameters["k"] == 3
    assert set(certificate.roles["base"]) == {4, 5}
    assert certificate.lattice_map is not None
    assert find_lattice_equivalence(polytope, certificate.rebuilt) is not None


def test_simplex_is_not_a_bundle_over_segment():
    assert recognize_bundle_over_segment(simplex(3)) is None


def test_box_is_a_bundle_three_ways():
    found = recognize_bundles_over_segment(box(3))
    assert len(found) == 3
    assert [c.roles["base"] for c in found] == [(0, 1), (2, 3), (4, 5)]


def test_recognize_double_expansion_of_example():
    """Ядро - трапеция площади 3/2"""
    certificate = recognize_double_expansion(example_polytope())
    assert certificate is not None
    assert set(certificate.roles["base_type"]) == {0, 1, 2, 3}
    core = certificate.parameters["core"]
    assert core.n_facets == 4
    assert volume(core) == Fraction(3, 2)


def test_recognize_expansion_of_simplex():
    certificate = recognize_expansion(simplex(4))
    assert certificate is not None
    assert certificate.family == "expansion"
    assert find_lattice_equivalence(simplex(4), certificate.rebuilt) is not None


def test_recognize_expansion_round_trip():
    polytope = expansion(trapezoid(), 0)
    certificate = recognize_expansion(polytope)
    assert certificate is not None
    assert find_lattice_equivalence(polytope, certificate.rebuilt) is not None


def test_thm_types_of_example():
    families = [c.family for c in recognize_thm_type(example_polytope(), EXAMPLE_H)]
    assert "a1" in families
    assert "b" in families
    with pytest.raises(DimensionError):
        recognize_thm_type(trapezoid(), (1, -1))


def test_blowup_tags():
    polytope = example_polytope()
    assert blowup_tag(polytope, EXAMPLE_GAMMA, (1, 3, 4)) == "edge_type_Fij_G"
    assert blowup_tag(polytope, EXAMPLE_GAMMA, (0, 1, 2, 4)) == "vertex"


def test_classify_example_blowup():
    """Один шаг стягивания типа (F_ij, G) приводит к типу b"""
    base = example_polytope()
    blown = blowup(base, {1, 3, 4})
    result = classify4d(blown, EXAMPLE_H)
    assert result.type_tag == "b"
    assert len(result.trace) == 1
    step = result.trace[0]
    assert step.tag == "edge_type_Fij_G"
    assert step.face == (1, 3, 4)
    assert step.face_labels == ("F2", "F4", "G1")
    assert step.label == "E1"
    assert result.terminal == base
    assert not result.terminal_essential
    assert replay_trace(result) == blown


def test_classify_inessential_double_expansion():
    result = classify4d(example_polytope(), EXAMPLE_H)
    assert result.type_tag == "b"
    assert result.trace == ()


def test_classify_simplex_is_inessential():
    result = classify4d(simplex(4), (1, 0, 0, 0))
    assert result.type_tag == "inessential"
    assert result.reason is None


def test_classify_zero_functional():
    assert classify4d(simplex(4), (0, 0, 0, 0)).type_tag == "zero"


def test_classify_rejects():
    with pytest.raises(NotMassLinearError):
        classify4d(example_polytope(), (-1, 0, 1, 0))
    with pytest.raises(DimensionError):
        classify4d(simplex(3), (1, 0, 0))


def test_expansion_destroys_mass_linearity():
    """Существенная H на Y(2, (1, 2)) перестает быть массово линейной на расширении"""
    bundle = make_yk(2, (1, 2), (0, 0, 1, 0, 3))
    report = mass_linear_test(bundle, (-3, 0, 0))
    assert report.verdict
    assert report.gamma == (2, -1, -1, 0, 0)
    assert is_inessential(bundle, (-3, 0, 0)) is None
    expanded = expansion(bundle, 3)
    assert not mass_linear_test(expanded, (-3, 0, 0, 0)).verdict


def test_planner_finds_essential_blowup():
    plan = essential_blowup_planner(example_polytope(), EXAMPLE_H)
    assert plan.feasible
    assert plan.steps
    assert mass_linear_test(plan.result, EXAMPLE_H).verdict
    assert is_inessential(plan.result, EXAMPLE_H) is None


def test_planner_rejects_essential_input():
    blown = blowup(example_polytope(), {1, 3, 4})
    with pytest.raises(ValidationError):
        essential_blowup_planner(blown, EXAMPLE_H)


EDGE_BLOWUP_CORES = {
    "trapezoid": trapezoid,
    "chain5": lambda: polygon_blowup_chain(5),
    "chain6": lambda: polygon_blowup_chain(6),
}
EDGE_BLOWUP_CASES = (
    [("trapezoid", 0), ("trapezoid", 1)]
    + [("chain5", g) for g in range(5)]
    + [("chain6", g) for g in range(6)]
)


@pytest.mark.slow
@pytest.mark.parametrize("core_name,edge", EDGE_BLOWUP_CASES)
def test_edge_blowup_makes_double_expansion_essential(core_name, edge):
    """
    Ядро - многоугольник, расширенный вдоль двух соседей ребра G;
    раздутие G ∩ B2 ∩ B4 сохраняет γ, а H становится существенной
    """
    core = EDGE_BLOWUP_CORES[core_name]()
    k = core.n_facets
    first, second = sorted(j for j in range(k) if j != edge and core.face({edge, j}) is not None)
    polytope = double_expansion(core, first, second)
    functional = tuple(b - a for a, b in zip(core.conormals[first], core.conormals[second])) + (-2, 2)
    gamma = (0,) * (k - 2) + (1, -1, -1, 1)
    report = mass_linear_test(polytope, functional)
    assert report.verdict
    assert report.gamma == gamma
    assert is_inessential(polytope, functional) is not None

    g = edge - sum(1 for j in (first, second) if j < edge)
    face = (g, k - 1, k + 1)
    assert blowup_tag(polytope, gamma, face) == "edge_type_Fij_G"
    blown = blowup(polytope, set(face))
    blown_report = mass_linear_test(blown, functional)
    assert blown_report.verdict
    assert blown_report.gamma == gamma + (0,)
    assert is_inessential(blown, functional) is None

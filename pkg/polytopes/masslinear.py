"""Массовая линейность: коэффициенты γ, эквивалентность фасет, несущественность, полная линейность"""
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import structlog

from app.config import get_settings
from polytopes.errors import FaceError, InconsistencyError, ValidationError
from polytopes.measure import center_of_mass, moment_poly, skeleton_barycenter, volume_poly
from polytopes.polytope_core import (
    FacePresentation,
    HPolytope,
    Point,
    chamber_radius,
    face_polytope,
    require_smooth,
)
from polytopes.rational_kernel import MultiPoly, dot, rank, solve_linear

logger = structlog.get_logger()


@dataclass(frozen=True)
class MassLinearReport:
    """
    Итог проверки массовой линейности

    gamma определен только при verdict=True; constant - отклонение Ĥ(κ) − Σγᵢκᵢ
    в базовой точке для кандидатных γ.
    """

    verdict: bool
    gamma: Optional[Tuple[Fraction, ...]]
    symmetric: FrozenSet[int]
    asymmetric: FrozenSet[int]
    pervasive_asymmetric: Tuple[bool, ...]
    candidate_gamma: Tuple[Fraction, ...]
    constant: Fraction

    def functional(self, polytope: HPolytope) -> Tuple[Fraction, ...]:
        """Σγᵢηᵢ"""
        if self.gamma is None:
            raise ValidationError("No coefficients for a non mass linear pair")
        return tuple(
            sum((g * eta[axis] for g, eta in zip(self.gamma, polytope.conormals)), Fraction(0))
            for axis in range(polytope.dim)
        )


@dataclass(frozen=True)
class ClassCertificate:
    members: Tuple[int, ...]
    complement_rank: int
    expected_rank: int
    sum_in_span: bool

    @property
    def valid(self) -> bool:
        return self.complement_rank == self.expected_rank and self.sum_in_span


@dataclass(frozen=True)
class EquivalenceClasses:
    classes: Tuple[Tuple[int, ...], ...]
    certificates: Tuple[ClassCertificate, ...]
    violations: Tuple[Tuple[int, ...], ...]

    def class_of(self, facet: int) -> Tuple[int, ...]:
        return next(c for c in self.classes if facet in c)

    def equivalent(self, i: int, j: int) -> bool:
        return j in self.class_of(i)

    def nontrivial(self) -> List[Tuple[int, ...]]:
        return [c for c in self.classes if len(c) >= 2]


@dataclass(frozen=True)
class InessentialWitness:
    beta: Tuple[Fraction, ...]


@dataclass(frozen=True)
class InessentialReduction:
    """H = H′ + H̃, H′ несущественна"""

    h_prime: Tuple[Fraction, ...]
    h_tilde: Tuple[Fraction, ...]
    gamma_prime: Tuple[Fraction, ...]
    gamma_tilde: Tuple[Fraction, ...]


@dataclass(frozen=True)
class FaceRestriction:
    presentation: FacePresentation
    functional: Tuple[int, ...]
    report: MassLinearReport


@dataclass(frozen=True)
class FullMassLinearReport:
    barycenters: Tuple[Point, ...]
    values: Tuple[Fraction, ...]
    verdict: bool
    mass_linear_by_barycenters: bool
    generated_by_barycenters: bool


def _functional(polytope: HPolytope, functional: Sequence[int]) -> Tuple[int, ...]:
    if len(functional) != polytope.dim:
        raise ValidationError(
            "Functional dimension mismatch",
            {"dim": polytope.dim, "functional": len(functional)},
        )
    return tuple(functional)


def _hat(mu: MultiPoly, vol: MultiPoly, kappa: Sequence[Fraction]) -> Fraction:
    return mu.evaluate(kappa) / vol.evaluate(kappa)


def is_pervasive(polytope: HPolytope, facet: int) -> bool:
    return len(polytope.neighbors(facet)) == polytope.n_facets - 1


def is_flat(polytope: HPolytope, facet: int) -> bool:
    """Конормали всех фасет, пересекающих данную, лежат в гиперплоскости"""
    rows = [polytope.conormals[j] for j in polytope.neighbors(facet)]
    return rank(rows, polytope.dim) <= polytope.dim - 1


def pervasive_facets(polytope: HPolytope) -> FrozenSet[int]:
    return frozenset(i for i in range(polytope.n_facets) if is_pervasive(polytope, i))


def flat_facets(polytope: HPolytope) -> FrozenSet[int]:
    return frozenset(i for i in range(polytope.n_facets) if is_flat(polytope, i))


def mass_linear_test(
    polytope: HPolytope,
    functional: Sequence[int],
    trials: Optional[int] = None,
    seed: Optional[int] = None,
) -> MassLinearReport:
    """
    Решить, линейна ли κ ↦ ⟨H, c_Δ(κ)⟩ на камере

    Кандидатные γᵢ берутся разностями (Ĥ(κ + t·eᵢ) − Ĥ(κ))/t при двух шагах t.
    Положительный вердикт дает только тождество μ_H − (Σγᵢκᵢ)·V ≡ 0.

    Args:
        polytope: гладкий многогранник
        functional: H ∈ ℤⁿ
        trials: число случайных точек предварительного фильтра
        seed: зерно для этих точек

    Returns:
        MassLinearReport
    """
    require_smooth(polytope)
    h = _functional(polytope, functional)
    settings = get_settings()
    trials = settings.PREFILTER_TRIALS if trials is None else trials
    seed = settings.SEED if seed is None else seed
    size = polytope.n_facets
    kappa = list(polytope.support)

    if all(x == 0 for x in h):
        zeros = tuple(Fraction(0) for _ in range(size))
        return MassLinearReport(True, zeros, frozenset(range(size)), frozenset(), (False,) * size, zeros, Fraction(0))

    vol = volume_poly(polytope)
    mu = moment_poly(polytope, h)
    radius = chamber_radius(polytope)
    base = _hat(mu, vol, kappa)

    candidate: List[Fraction] = []
    nonlinear = False
    for i in range(size):
        step = radius[i] / 2
        values = []
        for t in (step, step / 2):
            shifted = list(kappa)
            shifted[i] += t
            values.append((_hat(mu, vol, shifted) - base) / t)
        if values[0] != values[1]:
            nonlinear = True
        candidate.append(values[0])
    constant = base - dot(candidate, kappa)
    verdict = not nonlinear and constant == 0

    if verdict and trials > 0:
        rng = random.Random(seed)
        for _ in range(trials):
            point = [k + radius[i] * Fraction(rng.randint(-1000, 1000), 1000) for i, k in enumerate(kappa)]
            if mu.evaluate(point) != dot(candidate, point) * vol.evaluate(point):
                verdict = False
                logger.debug("Prefilter rejected linearity", name=polytope.name)
                break

    if verdict:
        residual = mu - MultiPoly.linear(candidate) * vol
        verdict = residual.is_zero()

    if verdict:
        gamma = tuple(candidate)
        if sum(gamma) != 0:
            raise InconsistencyError("Coefficients of a mass linear function must sum to zero", {"sum": str(sum(gamma))})
        symmetric = frozenset(i for i, g in enumerate(gamma) if g == 0)
    else:
        gamma = None
        symmetric, _ = symmetric_facets(polytope, h)
    asymmetric = frozenset(range(size)) - symmetric
    pervasive = tuple(i in asymmetric and is_pervasive(polytope, i) for i in range(size))
    logger.info(
        "Mass linearity decided",
        name=polytope.name,
        facets=size,
        verdict=verdict,
        asymmetric=len(asymmetric),
    )
    return MassLinearReport(verdict, gamma, symmetric, asymmetric, pervasive, tuple(candidate), constant)


def symmetric_facets(polytope: HPolytope, functional: Sequence[int]) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """
    Разбиение фасет на симметричные и асимметричные для любого H

    Фасета i симметрична, если ∂μ_H/∂κᵢ·V − μ_H·∂V/∂κᵢ ≡ 0.
    """
    require_smooth(polytope)
    h = _functional(polytope, functional)
    size = polytope.n_facets
    if all(x == 0 for x in h):
        return frozenset(range(size)), frozenset()
    vol = volume_poly(polytope)
    mu = moment_poly(polytope, h)
    symmetric = set()
    for i in range(size):
        expression = mu.partial(i) * vol - mu * vol.partial(i)
        if expression.is_zero():
            symmetric.add(i)
    return frozenset(symmetric), frozenset(range(size)) - frozenset(symmetric)


def _pair_equivalent(polytope: HPolytope, i: int, j: int) -> bool:
    n = polytope.dim
    others = [eta for k, eta in enumerate(polytope.conormals) if k not in (i, j)]
    if rank(others, n) != n - 1:
        return False
    combined = tuple(a + b for a, b in zip(polytope.conormals[i], polytope.conormals[j]))
    return rank(others + [combined], n) == n - 1


def _class_certificate(polytope: HPolytope, members: Tuple[int, ...]) -> ClassCertificate:
    n = polytope.dim
    others = [eta for k, eta in enumerate(polytope.conormals) if k not in members]
    complement_rank = rank(others, n) if others else 0
    total = tuple(sum(polytope.conormals[i][axis] for i in members) for axis in range(n))
    in_span = (rank(others + [total], n) if others else rank([total], n)) == complement_rank
    return ClassCertificate(members, complement_rank, n - (len(members) - 1), in_span)


def equivalence_classes(polytope: HPolytope) -> EquivalenceClasses:
    """
    Классы эквивалентности фасет

    Попарное отношение, затем компоненты связности и повторная проверка
    каждого класса целиком.
    """
    size = polytope.n_facets
    parent = list(range(size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(size):
        for j in range(i + 1, size):
            if find(i) != find(j) and _pair_equivalent(polytope, i, j):
                parent[find(j)] = find(i)

    groups: Dict[int, List[int]] = {}
    for i in range(size):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(sorted(tuple(g) for g in groups.values()))
    certificates = tuple(_class_certificate(polytope, c) for c in classes if len(c) >= 2)
    violations = tuple(cert.members for cert in certificates if not cert.valid)
    if violations:
        logger.warning("Equivalence class failed verification", name=polytope.name, classes=[list(v) for v in violations])
    return EquivalenceClasses(classes, certificates, violations)


def is_inessential(
    polytope: HPolytope,
    functional: Sequence[int],
    classes: Optional[EquivalenceClasses] = None,
) -> Optional[InessentialWitness]:
    """
    Найти β с H = Σβᵢηᵢ и нулевыми суммами по классам

    Returns:
        InessentialWitness или None, если H существенна

    Raises:
        InconsistencyError: Σβᵢκᵢ расходится с ⟨H, c⟩
    """
    h = _functional(polytope, functional)
    classes = classes or equivalence_classes(polytope)
    size = polytope.n_facets
    rows: List[List[int]] = []
    rhs: List[int] = []
    for axis in range(polytope.dim):
        rows.append([eta[axis] for eta in polytope.conormals])
        rhs.append(h[axis])
    for members in classes.classes:
        rows.append([1 if i in members else 0 for i in range(size)])
        rhs.append(0)
    solved = solve_linear(rows, rhs, size)
    if solved is None:
        return None
    beta = solved.solution
    if any(x != 0 for x in h):
        expected = dot(h, center_of_mass(polytope))
        if dot(beta, polytope.support) != expected:
            raise InconsistencyError(
                "Inessential witness disagrees with the center of mass",
                {"expected": str(expected), "witness": str(dot(beta, polytope.support))},
            )
    return InessentialWitness(beta)


def inessential_reduction(
    polytope: HPolytope,
    functional: Sequence[int],
    members: Sequence[int],
    report: Optional[MassLinearReport] = None,
) -> InessentialReduction:
    """
    Вычесть несущественную функцию, делающую все фасеты класса, кроме последней, симметричными

    H′ = Σ_{i∈I, i≠m} γᵢ(ηᵢ − η_m), H̃ = H − H′.
    """
    report = report or mass_linear_test(polytope, functional)
    if not report.verdict:
        raise FaceError("Reduction needs a mass linear function")
    members = sorted(members)
    classes = equivalence_classes(polytope)
    if len(members) < 2 or tuple(members) not in classes.classes:
        raise FaceError("Index set is not an equivalence class", {"members": members})
    last = members[-1]
    gamma_prime = [Fraction(0)] * polytope.n_facets
    for i in members[:-1]:
        gamma_prime[i] = report.gamma[i]
        gamma_prime[last] -= report.gamma[i]
    gamma_tilde = tuple(g - p for g, p in zip(report.gamma, gamma_prime))
    h_prime = tuple(
        sum((g * eta[axis] for g, eta in zip(gamma_prime, polytope.conormals)), Fraction(0))
        for axis in range(polytope.dim)
    )
    h_tilde = tuple(Fraction(x) - y for x, y in zip(functional, h_prime))
    return InessentialReduction(h_prime, h_tilde, tuple(gamma_prime), gamma_tilde)


def restrict_to_face(
    polytope: HPolytope,
    functional: Sequence[int],
    index_set: Sequence[int],
    report: Optional[MassLinearReport] = None,
) -> FaceRestriction:
    """
    Ограничить H на симметричную грань

    Raises:
        FaceError: грань не симметрична
        InconsistencyError: коэффициенты на грани не совпали с γ
    """
    h = _functional(polytope, functional)
    report = report or mass_linear_test(polytope, h)
    presentation = face_polytope(polytope, index_set)
    asymmetric_in_face = sorted(i for i in presentation.face.index_set if i in report.asymmetric)
    if asymmetric_in_face:
        raise FaceError("Face is not symmetric", {"asymmetric": asymmetric_in_face})
    restricted = tuple(int(dot(h, e)) for e in presentation.basis)
    sub_report = mass_linear_test(presentation.polytope, restricted)
    if report.verdict:
        if not sub_report.verdict:
            raise InconsistencyError("Restriction of a mass linear function is not mass linear")
        for position, facet in enumerate(presentation.facet_map):
            if sub_report.gamma[position] != report.gamma[facet]:
                raise InconsistencyError(
                    "Restricted coefficient mismatch",
                    {"facet": facet, "face": str(sub_report.gamma[position]), "ambient": str(report.gamma[facet])},
                )
        missing = sorted(report.asymmetric - set(presentation.facet_map))
        if missing:
            raise InconsistencyError("Asymmetric facet misses a symmetric face", {"facets": missing})
    return FaceRestriction(presentation, restricted, sub_report)


def generating_vector(
    polytope: HPolytope,
    functional: Sequence[int],
    gamma: Optional[Sequence[Fraction]] = None,
) -> Optional[Point]:
    """
    ξ_H с ⟨ηᵢ, ξ⟩ = γᵢ для всех фасет или None

    Args:
        gamma: коэффициенты H, если уже известны; иначе берутся из mass_linear_test

    Returns:
        None, если H не массово линейна или система несовместна
    """
    if gamma is None:
        report = mass_linear_test(polytope, functional)
        if not report.verdict:
            return None
        gamma = report.gamma
    elif len(gamma) != polytope.n_facets:
        raise ValidationError("One coefficient per facet required", {"facets": polytope.n_facets, "gamma": len(gamma)})
    solved = solve_linear(polytope.conormals, list(gamma), polytope.dim)
    return solved.solution if solved is not None else None


def fully_mass_linear_test(polytope: HPolytope, functional: Sequence[int]) -> FullMassLinearReport:
    """Сравнить ⟨H, B_k⟩ при k = 0..n"""
    h = _functional(polytope, functional)
    n = polytope.dim
    barycenters = tuple(skeleton_barycenter(polytope, k) for k in range(n + 1))
    values = tuple(dot(h, b) for b in barycenters)
    verdict = len(set(values)) == 1
    by_barycenters = values[0] == values[n - 1] == values[n]
    generated = values[0] == values[max(n - 2, 0)] == values[n]
    return FullMassLinearReport(barycenters, values, verdict, by_barycenters, generated)

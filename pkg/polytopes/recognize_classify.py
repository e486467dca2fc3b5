"""Распознавание семейств и классификация массово линейных пар в размерности 4"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import structlog

from polytopes.constructions import (
    BundleSpec121,
    BundleSpecD2Polygon,
    BundleSpecYk,
    blowdown,
    blowup,
    bundle_121,
    bundle_D2_polygon,
    bundle_Yk,
    double_expansion,
    expansion,
)
from polytopes.errors import (
    DimensionError,
    InconsistencyError,
    NotMassLinearError,
    PolytopeError,
    ValidationError,
)
from polytopes.masslinear import (
    MassLinearReport,
    equivalence_classes,
    is_inessential,
    mass_linear_test,
)
from polytopes.polytope_core import (
    HPolytope,
    LatticeMap,
    face_polytope,
    find_lattice_equivalence,
    lattice_equivalence,
)
from polytopes.rational_kernel import IntVector, determinant, dot, inverse, is_integral, rank, transpose

logger = structlog.get_logger()


@dataclass(frozen=True)
class RecognitionCertificate:
    """
    Распознанная структура

    roles - наборы фасет по ролям, parameters - восстановленные параметры
    конструктора, rebuilt - его результат, эквивалентный входу через lattice_map.
    """

    family: str
    roles: Dict[str, Tuple[int, ...]]
    parameters: Dict[str, Any]
    facet_map: Optional[Tuple[int, ...]] = None
    lattice_map: Optional[LatticeMap] = None
    rebuilt: Optional[HPolytope] = None


def _unimodular_map(sources: Sequence[IntVector], targets: Sequence[IntVector]) -> Optional[List[List[int]]]:
    """M с M·sᵢ = tᵢ, если она целая и унимодулярна"""
    n = len(sources)
    try:
        source_inv = inverse(transpose(sources))
    except ValidationError:
        return None
    target = transpose(targets)
    matrix = [[sum(target[r][m] * source_inv[m][c] for m in range(n)) for c in range(n)] for r in range(n)]
    if not is_integral(matrix) or abs(determinant(matrix)) != 1:
        return None
    return [[int(x) for x in row] for row in matrix]


def _apply(matrix: Sequence[Sequence[int]], vector: Sequence[int]) -> IntVector:
    return tuple(int(dot(row, vector)) for row in matrix)


def _neg_unit(n: int, i: int) -> IntVector:
    return tuple(-1 if j == i else 0 for j in range(n))


def _verify(polytope: HPolytope, rebuilt: HPolytope, facet_map: Sequence[int]) -> Optional[LatticeMap]:
    return lattice_equivalence(polytope, rebuilt, facet_map)


# ---------- расслоения над отрезком ----------


def _recognize_yk(polytope: HPolytope, fiber: Sequence[int], base: Tuple[int, int]) -> Optional[RecognitionCertificate]:
    n = polytope.dim
    k = n - 1
    for g1, g2 in (base, base[::-1]):
        for m in fiber:
            others = [i for i in fiber if i != m]
            sources = [polytope.conormals[i] for i in others] + [polytope.conormals[g1]]
            targets = [_neg_unit(n, i) for i in range(n)]
            matrix = _unimodular_map(sources, targets)
            if matrix is None:
                continue
            if _apply(matrix, polytope.conormals[m]) != (1,) * k + (0,):
                continue
            image = _apply(matrix, polytope.conormals[g2])
            if image[k] != 1:
                continue
            a = image[:k]
            order = others + [m, g1, g2]
            kappa = tuple(polytope.support[i] for i in order)
            try:
                rebuilt = bundle_Yk(BundleSpecYk(k, a, kappa))
            except PolytopeError:
                continue
            facet_map = [0] * polytope.n_facets
            for position, i in enumerate(order):
                facet_map[i] = position
            found = _verify(polytope, rebuilt, facet_map)
            if found is not None:
                return RecognitionCertificate(
                    family="Yk",
                    roles={"fiber": tuple(order[: k + 1]), "base": (g1, g2)},
                    parameters={"k": k, "a": a},
                    facet_map=tuple(facet_map),
                    lattice_map=found,
                    rebuilt=rebuilt,
                )
    return None


def recognize_bundles_over_segment(polytope: HPolytope) -> List[RecognitionCertificate]:
    """Все классы {i, j} с пустым F_ij: Δ - расслоение над Δ₁ с базой {Fᵢ, Fⱼ}"""
    result = []
    for members in equivalence_classes(polytope).classes:
        if len(members) != 2 or polytope.face(members) is not None:
            continue
        base = (members[0], members[1])
        fiber = [i for i in range(polytope.n_facets) if i not in members]
        certificate = None
        if len(fiber) == polytope.dim:
            certificate = _recognize_yk(polytope, fiber, base)
        if certificate is None:
            fiber_polytope = face_polytope(polytope, [base[0]]).polytope
            certificate = RecognitionCertificate(
                family="bundle_over_segment",
                roles={"fiber": tuple(fiber), "base": base},
                parameters={"fiber": fiber_polytope},
            )
        result.append(certificate)
    return result


def recognize_bundle_over_segment(polytope: HPolytope) -> Optional[RecognitionCertificate]:
    found = recognize_bundles_over_segment(polytope)
    return found[0] if found else None


# ---------- расширения ----------


def _expansion_certificate(polytope: HPolytope, members: Tuple[int, ...]) -> Optional[RecognitionCertificate]:
    for last in reversed(members):
        head = [i for i in members if i != last]
        try:
            presentation = face_polytope(polytope, head)
        except PolytopeError:
            continue
        if last not in presentation.facet_map:
            continue
        core = presentation.polytope
        j = presentation.facet_map.index(last)
        try:
            rebuilt = expansion(core, j, len(members) - 1)
        except PolytopeError:
            continue
        found = find_lattice_equivalence(polytope, rebuilt)
        if found is None:
            continue
        facet_map, lattice_map = found
        return RecognitionCertificate(
            family="expansion",
            roles={
                "base_type": tuple(members),
                "fiber_type": tuple(i for i in range(polytope.n_facets) if i not in members),
            },
            parameters={"fold": len(members) - 1, "core": core, "facet": j},
            facet_map=facet_map,
            lattice_map=lattice_map,
            rebuilt=rebuilt,
        )
    return None


def recognize_expansion(polytope: HPolytope) -> Optional[RecognitionCertificate]:
    """
    Класс I с непустым F_I: (|I|−1)-кратное расширение грани F_{I′}

    Если у класса F_I пусто, перебираются его подмножества по убыванию размера.
    """
    classes = equivalence_classes(polytope).nontrivial()
    for members in classes:
        if polytope.face(members) is not None:
            found = _expansion_certificate(polytope, tuple(members))
            if found is not None:
                return found
    for members in classes:
        for size in range(len(members) - 1, 1, -1):
            for subset in combinations(members, size):
                if polytope.face(subset) is None:
                    continue
                found = _expansion_certificate(polytope, subset)
                if found is not None:
                    return found
    return None


def _equivalent_pairs(polytope: HPolytope) -> List[Tuple[int, int]]:
    classes = equivalence_classes(polytope)
    pairs = []
    for members in classes.nontrivial():
        for i, j in combinations(members, 2):
            if polytope.face({i, j}) is not None:
                pairs.append((i, j))
    return pairs


def double_expansion_certificates(polytope: HPolytope) -> Iterator[RecognitionCertificate]:
    """Пары F₁ ∼ F₂, F₃ ∼ F₄ с непустыми F₁₂, F₃₄; ядро - грань F₁₃"""
    pairs = _equivalent_pairs(polytope)
    for first, second in combinations(pairs, 2):
        if set(first) & set(second):
            continue
        for p1, p2 in (first, first[::-1]):
            for p3, p4 in (second, second[::-1]):
                try:
                    presentation = face_polytope(polytope, [p1, p3])
                except PolytopeError:
                    continue
                if p2 not in presentation.facet_map or p4 not in presentation.facet_map:
                    continue
                core = presentation.polytope
                j1 = presentation.facet_map.index(p2)
                j2 = presentation.facet_map.index(p4)
                try:
                    rebuilt = double_expansion(core, j1, j2)
                except PolytopeError:
                    continue
                found = find_lattice_equivalence(polytope, rebuilt)
                if found is None:
                    continue
                facet_map, lattice_map = found
                base_type = (p1, p2, p3, p4)
                yield RecognitionCertificate(
                    family="double_expansion",
                    roles={
                        "base_type": base_type,
                        "fiber_type": tuple(i for i in range(polytope.n_facets) if i not in base_type),
                    },
                    parameters={"core": core, "facets": (j1, j2)},
                    facet_map=facet_map,
                    lattice_map=lattice_map,
                    rebuilt=rebuilt,
                )
                break
            else:
                continue
            break


def recognize_double_expansion(polytope: HPolytope) -> Optional[RecognitionCertificate]:
    return next(double_expansion_certificates(polytope), None)


# ---------- типы a2 и a3 ----------


def recognize_bundle_121(polytope: HPolytope) -> Optional[RecognitionCertificate]:
    """
    Нормальная форма (1,0,0,0), (−1,0,0,0), (0,−1,0,0), (0,0,−1,0), (d,1,1,0), (0,0,0,−1), (a,1)

    Перебор ролей: противоположная пара, упорядоченная тройка слоя Δ₂, пара базы.
    """
    if polytope.dim != 4 or polytope.n_facets != 7:
        return None
    normals = polytope.conormals
    for p0 in range(7):
        for p1 in range(7):
            if tuple(-x for x in normals[p0]) != normals[p1]:
                continue
            rest = [i for i in range(7) if i not in (p0, p1)]
            for f2, f3, f4 in permutations(rest, 3):
                remaining = [i for i in rest if i not in (f2, f3, f4)]
                for f5, f6 in (tuple(remaining), tuple(remaining[::-1])):
                    sources = [normals[p1], normals[f2], normals[f3], normals[f5]]
                    targets = [_neg_unit(4, i) for i in range(4)]
                    matrix = _unimodular_map(sources, targets)
                    if matrix is None:
                        continue
                    fiber = _apply(matrix, normals[f4])
                    twist = _apply(matrix, normals[f6])
                    if fiber[1:] != (1, 1, 0) or fiber[0] < 0 or twist[3] != 1:
                        continue
                    order = [p0, p1, f2, f3, f4, f5, f6]
                    kappa = tuple(polytope.support[i] for i in order)
                    try:
                        rebuilt = bundle_121(BundleSpec121(twist[:3], fiber[0], kappa))
                    except PolytopeError:
                        continue
                    facet_map = [0] * 7
                    for position, i in enumerate(order):
                        facet_map[i] = position
                    found = _verify(polytope, rebuilt, facet_map)
                    if found is None:
                        continue
                    return RecognitionCertificate(
                        family="bundle_121",
                        roles={"segment_fiber": (p0, p1), "simplex_fiber": (f2, f3, f4), "base": (f5, f6)},
                        parameters={"a": twist[:3], "d": fiber[0]},
                        facet_map=tuple(facet_map),
                        lattice_map=found,
                        rebuilt=rebuilt,
                    )
    return None


def _adjacency_order(polytope: HPolytope, facets: Sequence[int], first: int, second: int) -> Optional[List[int]]:
    order = [first, second]
    while len(order) < len(facets):
        tail = order[-1]
        following = [g for g in facets if g not in order and polytope.face({tail, g}) is not None]
        if len(following) != 1:
            return None
        order.append(following[0])
    return order


def recognize_polygon_bundle(polytope: HPolytope) -> Optional[RecognitionCertificate]:
    """Три фасеты с нулевой суммой конормалей ранга 2 и комбинаторика Δ₂ × многоугольник"""
    if polytope.dim != 4:
        return None
    N = polytope.n_facets
    k = N - 3
    if k < 3:
        return None
    normals = polytope.conormals
    for triple in combinations(range(N), 3):
        total = tuple(sum(normals[i][axis] for i in triple) for axis in range(4))
        if any(total) or rank([normals[i] for i in triple], 4) != 2:
            continue
        if polytope.face(triple) is not None:
            continue
        if any(polytope.face(pair) is None for pair in combinations(triple, 2)):
            continue
        if len(polytope.vertices) != 3 * k:
            continue
        base_facets = [g for g in range(N) if g not in triple]
        for f1, f2 in permutations(triple, 2):
            (f3,) = [i for i in triple if i not in (f1, f2)]
            for g1, g2 in permutations(base_facets, 2):
                if polytope.face({f1, f2, g1, g2}) is None:
                    continue
                order = _adjacency_order(polytope, base_facets, g1, g2)
                if order is None:
                    continue
                sources = [normals[f1], normals[f2], normals[g1], normals[g2]]
                targets = [_neg_unit(4, i) for i in range(4)]
                matrix = _unimodular_map(sources, targets)
                if matrix is None or _apply(matrix, normals[f3]) != (1, 1, 0, 0):
                    continue
                images = [_apply(matrix, normals[g]) for g in order]
                twists = tuple((img[0], img[1]) for img in images)
                kf1, kf2 = polytope.support[f1], polytope.support[f2]
                base_support = [polytope.support[g] + b1 * kf1 + b2 * kf2 for g, (b1, b2) in zip(order, twists)]
                full_order = [f1, f2, f3] + order
                try:
                    base = HPolytope([img[2:] for img in images], base_support, name="base")
                    rebuilt = bundle_D2_polygon(
                        BundleSpecD2Polygon(base, twists, tuple(polytope.support[i] for i in full_order))
                    )
                except PolytopeError:
                    continue
                facet_map = [0] * N
                for position, i in enumerate(full_order):
                    facet_map[i] = position
                found = _verify(polytope, rebuilt, facet_map)
                if found is None:
                    continue
                return RecognitionCertificate(
                    family="bundle_d2_polygon",
                    roles={"fiber": (f1, f2, f3), "base": tuple(order)},
                    parameters={"base": base, "twists": twists},
                    facet_map=tuple(facet_map),
                    lattice_map=found,
                    rebuilt=rebuilt,
                )
    return None


def recognize_thm_type(
    polytope: HPolytope,
    functional: Sequence[int],
    report: Optional[MassLinearReport] = None,
) -> List[RecognitionCertificate]:
    """
    Все подходящие типы a1, a2, a3, b в этом порядке

    b требует, чтобы асимметричными были ровно четыре фасеты базового типа.
    """
    if polytope.dim != 4:
        raise DimensionError("Classification works in dimension four", {"dim": polytope.dim})
    report = report or mass_linear_test(polytope, functional)
    found: List[RecognitionCertificate] = []

    for certificate in recognize_bundles_over_segment(polytope):
        if certificate.family == "Yk" and certificate.parameters["k"] == 3:
            found.append(_retag(certificate, "a1"))
            break
    a2 = recognize_bundle_121(polytope)
    if a2 is not None:
        found.append(_retag(a2, "a2"))
    a3 = recognize_polygon_bundle(polytope)
    if a3 is not None:
        found.append(_retag(a3, "a3"))
    for certificate in double_expansion_certificates(polytope):
        if frozenset(certificate.roles["base_type"]) == report.asymmetric:
            found.append(_retag(certificate, "b"))
            break
    return found


def _retag(certificate: RecognitionCertificate, tag: str) -> RecognitionCertificate:
    parameters = dict(certificate.parameters)
    parameters["structure"] = certificate.family
    return RecognitionCertificate(
        tag,
        certificate.roles,
        parameters,
        certificate.facet_map,
        certificate.lattice_map,
        certificate.rebuilt,
    )


# ---------- классификация ----------


@dataclass(frozen=True)
class TraceEntry:
    """
    Один шаг стягивания

    facet - позиция исключительного дивизора до стягивания, face - грань в
    стянутом многограннике, tag - тип раздутия.
    """

    facet: int
    label: str
    face: Tuple[int, ...]
    face_labels: Tuple[str, ...]
    eps: Fraction
    tag: str


@dataclass(frozen=True)
class ClassificationResult:
    type_tag: str
    trace: Tuple[TraceEntry, ...]
    terminal: HPolytope
    terminal_report: MassLinearReport
    terminal_essential: bool
    certificates: Tuple[RecognitionCertificate, ...] = ()
    alternatives: Tuple[str, ...] = ()
    reason: Optional[str] = None
    input_polytope: Optional[HPolytope] = field(default=None, compare=False)


def blowup_tag(polytope: HPolytope, gamma: Sequence[Fraction], face: Sequence[int]) -> str:
    """
    Тип раздутия грани F_I по коэффициентам γ стянутого многогранника

    vertex, symmetric_2face, edge_type_Fij_G (G симметрична, γᵢ + γⱼ = 0,
    ребро пересекает все асимметричные фасеты) или other.
    """
    members = frozenset(face)
    n = polytope.dim
    if len(members) == n:
        return "vertex"
    if len(members) == n - 2 and all(gamma[i] == 0 for i in members):
        return "symmetric_2face"
    if len(members) == n - 1:
        meets_all = all(
            polytope.face(members | {i}) is not None
            for i, g in enumerate(gamma)
            if g != 0 and i not in members
        )
        if meets_all:
            for g in members:
                if gamma[g] != 0:
                    continue
                rest = [i for i in members if i != g]
                if len(rest) == 2 and gamma[rest[0]] + gamma[rest[1]] == 0:
                    return "edge_type_Fij_G"
    return "other"


def _blowdown_order(polytope: HPolytope) -> List[int]:
    exceptional = [
        (int(label[1:]), i)
        for i, label in enumerate(polytope.labels)
        if label.startswith("E") and label[1:].isdigit()
    ]
    first = [i for _, i in sorted(exceptional, reverse=True)]
    return first + [i for i in range(polytope.n_facets) if i not in first]


def _essential(polytope: HPolytope, functional: Sequence[int]) -> bool:
    return is_inessential(polytope, functional) is None


def classify4d(polytope: HPolytope, functional: Sequence[int]) -> ClassificationResult:
    """
    Классифицировать массово линейную пару (Δ, H) в размерности 4

    Жадно стягивает фасеты (сначала исключительные дивизоры E<n>, новые
    первыми), пока не распознан тип или многогранник не стал минимальным.

    Raises:
        DimensionError: dim ≠ 4
        NotMassLinearError: H не массово линейна
        InconsistencyError: коэффициенты изменились при стягивании
    """
    if polytope.dim != 4:
        raise DimensionError("Classification works in dimension four", {"dim": polytope.dim})
    report = mass_linear_test(polytope, functional)
    if not report.verdict:
        raise NotMassLinearError("Functional is not mass linear", {"name": polytope.name})

    if not any(functional):
        return ClassificationResult("zero", (), polytope, report, False, input_polytope=polytope)

    if not _essential(polytope, functional):
        certificates = [c for c in recognize_thm_type(polytope, functional, report) if c.family == "b"]
        tag = "b" if certificates else "inessential"
        logger.info("Pair classified", name=polytope.name, type=tag, steps=0)
        return ClassificationResult(tag, (), polytope, report, False, tuple(certificates), input_polytope=polytope)

    current = polytope
    trace: List[TraceEntry] = []
    while True:
        essential = _essential(current, functional)
        certificates = recognize_thm_type(current, functional, report)
        if essential:
            usable = [c for c in certificates if c.family in ("a1", "a2", "a3")]
        else:
            usable = [c for c in certificates if c.family == "b"]
        if usable:
            tag = usable[0].family
            alternatives = tuple(c.family for c in usable[1:])
            logger.info("Pair classified", name=polytope.name, type=tag, steps=len(trace), alternatives=list(alternatives))
            return ClassificationResult(
                tag, tuple(reversed(trace)), current, report, essential, tuple(usable), alternatives, None, polytope
            )

        step = None
        for facet in _blowdown_order(current):
            outcome = blowdown(current, facet)
            if outcome.success:
                step = outcome
                break
        if step is None:
            reason = "minimal polytope of no recognized type" if essential else "inessential and not a double expansion"
            logger.info("Pair unclassified", name=polytope.name, steps=len(trace), reason=reason)
            return ClassificationResult(
                "unclassified", tuple(reversed(trace)), current, report, essential, (), (), reason, polytope
            )

        reduced = step.polytope
        reduced_report = mass_linear_test(reduced, functional)
        expected = tuple(g for i, g in enumerate(report.gamma) if i != step.facet)
        if not reduced_report.verdict or reduced_report.gamma != expected or report.gamma[step.facet] != 0:
            raise InconsistencyError(
                "Coefficients changed under blowdown",
                {"facet": current.labels[step.facet], "name": polytope.name},
            )
        trace.append(
            TraceEntry(
                facet=step.facet,
                label=current.labels[step.facet],
                face=step.index_set,
                face_labels=tuple(reduced.labels[i] for i in step.index_set),
                eps=step.eps,
                tag=blowup_tag(reduced, reduced_report.gamma, step.index_set),
            )
        )
        logger.debug("Facet blown down", facet=current.labels[step.facet], tag=trace[-1].tag)
        current = reduced
        report = reduced_report


def replay_trace(result: ClassificationResult) -> HPolytope:
    """Раздуть терминальный многогранник по шагам трассы"""
    current = result.terminal
    for entry in result.trace:
        current = blowup(current, entry.face, entry.eps, position=entry.facet, label=entry.label)
    return current


# ---------- планировщик раздутий ----------


@dataclass(frozen=True)
class BlowupPlan:
    feasible: bool
    steps: Tuple[Tuple[str, ...], ...]
    reason: Optional[str] = None
    result: Optional[HPolytope] = None


def _fij_g_edges(polytope: HPolytope, gamma: Sequence[Fraction]) -> List[Tuple[int, ...]]:
    edges = []
    for face in polytope.faces_of_dimension(1):
        members = tuple(sorted(face.index_set))
        if blowup_tag(polytope, gamma, members) == "edge_type_Fij_G":
            edges.append(members)
    return edges


def essential_blowup_planner(polytope: HPolytope, functional: Sequence[int]) -> BlowupPlan:
    """
    Найти раздутия типа (F_ij, G), делающие H существенной

    Критерии: |γ| равны на четырех базовых фасетах, ядро не треугольник,
    у ядра есть ребро, пересекающее оба ребра расширения. Поиск глубины ≤ 2.

    Raises:
        ValidationError: вход не двойное расширение многоугольника с
            асимметричными базовыми фасетами или H существенна
    """
    report = mass_linear_test(polytope, functional)
    if not report.verdict:
        raise NotMassLinearError("Functional is not mass linear", {"name": polytope.name})
    if _essential(polytope, functional):
        raise ValidationError("Functional is already essential")
    certificate = next(
        (
            c
            for c in double_expansion_certificates(polytope)
            if frozenset(c.roles["base_type"]) == report.asymmetric
        ),
        None,
    )
    if certificate is None or polytope.dim != 4:
        raise ValidationError("Polytope is not a double expansion of a polygon with asymmetric base-type facets")

    magnitudes = {abs(report.gamma[i]) for i in certificate.roles["base_type"]}
    if len(magnitudes) != 1:
        return BlowupPlan(False, (), "base-type coefficients differ in absolute value")
    core: HPolytope = certificate.parameters["core"]
    if core.n_facets == 3:
        return BlowupPlan(False, (), "core polygon is a triangle")
    j1, j2 = certificate.parameters["facets"]
    bridging = [
        e for e in range(core.n_facets)
        if e not in (j1, j2) and core.face({e, j1}) is not None and core.face({e, j2}) is not None
    ]
    if not bridging:
        return BlowupPlan(False, (), "no core edge meets both expansion edges")

    def search(current: HPolytope, gamma: Tuple[Fraction, ...], depth: int) -> Optional[Tuple[List[Tuple[str, ...]], HPolytope]]:
        for edge in _fij_g_edges(current, gamma):
            try:
                candidate = blowup(current, edge)
            except PolytopeError:
                continue
            step = tuple(current.labels[i] for i in edge)
            candidate_report = mass_linear_test(candidate, functional)
            if not candidate_report.verdict:
                continue
            if _essential(candidate, functional):
                return [step], candidate
            if depth > 1:
                deeper = search(candidate, candidate_report.gamma, depth - 1)
                if deeper is not None:
                    return [step] + deeper[0], deeper[1]
        return None

    found = search(polytope, report.gamma, 2)
    if found is None:
        return BlowupPlan(False, (), "no admissible blowup sequence of length at most two")
    steps, result = found
    logger.info("Essential blowup found", name=polytope.name, steps=[list(s) for s in steps])
    return BlowupPlan(True, tuple(steps), None, result)

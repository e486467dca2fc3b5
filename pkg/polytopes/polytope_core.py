"""Полупространственная модель многогранника: вершины, решетка граней, гладкость, камеры"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import structlog

from polytopes.errors import (
    EmptyPolytopeError,
    FaceError,
    NonSimpleVertexError,
    NonSmoothError,
    RedundantHalfspaceError,
    UnboundedPolytopeError,
    ValidationError,
)
from polytopes.rational_kernel import (
    IntVector,
    Rational,
    determinant,
    dot,
    format_rational,
    inverse,
    is_integral,
    nullspace,
    primitive,
    rank,
    solve_linear,
    to_rational,
    transpose,
)

logger = structlog.get_logger()

Point = Tuple[Fraction, ...]
IndexSet = FrozenSet[int]


@dataclass(frozen=True)
class Vertex:
    """Вершина: точка и n фасет, сходящихся в ней"""

    point: Point
    basis: Tuple[int, ...]


@dataclass(frozen=True)
class Face:
    """Непустая грань F_I с каноническим (максимальным) набором фасет"""

    index_set: IndexSet
    vertex_ids: Tuple[int, ...]
    dimension: int


class HPolytope:
    """
    Многогранник ⋂ᵢ {x | ⟨ηᵢ, x⟩ ≤ κᵢ}

    Конструктор проверяет ограниченность, непустоту внутренности и отсутствие
    лишних полупространств. Несимплициальные вершины допускаются, но
    обнаруживаются: vertices бросает NonSimpleVertexError.
    """

    def __init__(
        self,
        conormals: Sequence[Sequence[int]],
        support: Sequence[Rational],
        name: Optional[str] = None,
        labels: Optional[Sequence[str]] = None,
    ):
        if not conormals:
            raise ValidationError("Polytope needs at least one facet")
        dim = len(conormals[0])
        if dim == 0:
            raise ValidationError("Ambient dimension must be positive")
        normals: List[IntVector] = []
        for i, eta in enumerate(conormals):
            eta = tuple(eta)
            if len(eta) != dim:
                raise ValidationError("Conormal length mismatch", {"facet": i, "expected": dim, "actual": len(eta)})
            if any(not isinstance(x, int) or isinstance(x, bool) for x in eta):
                raise ValidationError("Conormals must be integer vectors", {"facet": i})
            if primitive(eta) != eta:
                raise ValidationError("Conormal is not primitive", {"facet": i, "normal": list(eta)})
            normals.append(eta)
        if len(support) != len(normals):
            raise ValidationError(
                "Support vector length mismatch",
                {"facets": len(normals), "support": len(support)},
            )
        if labels is not None and len(labels) != len(normals):
            raise ValidationError("Label count mismatch", {"facets": len(normals), "labels": len(labels)})
        if len(set(normals)) != len(normals):
            raise ValidationError("Two facets share a conormal")

        self._dim = dim
        self._conormals: Tuple[IntVector, ...] = tuple(normals)
        self._support: Tuple[Fraction, ...] = tuple(to_rational(k) for k in support)
        self._name = name
        self._labels = tuple(labels) if labels is not None else tuple(f"F{i + 1}" for i in range(len(normals)))

        self._check_bounded()
        self._raw = self._scan_vertices()
        self._check_facets()

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def n_facets(self) -> int:
        return len(self._conormals)

    @property
    def conormals(self) -> Tuple[IntVector, ...]:
        return self._conormals

    @property
    def support(self) -> Tuple[Fraction, ...]:
        return self._support

    @property
    def name(self) -> Optional[str]:
        return self._name

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    def __eq__(self, other) -> bool:
        if not isinstance(other, HPolytope):
            return NotImplemented
        return self._conormals == other._conormals and self._support == other._support

    def __hash__(self) -> int:
        return hash((self._conormals, self._support))

    def __repr__(self) -> str:
        kappa = ",".join(format_rational(k) for k in self._support)
        return f"HPolytope(name={self.name!r}, dim={self._dim}, facets={self.n_facets}, kappa=[{kappa}])"

    def with_support(self, support: Sequence[Rational]) -> "HPolytope":
        return HPolytope(self._conormals, support, name=self.name, labels=self._labels)

    def with_labels(self, labels: Sequence[str]) -> "HPolytope":
        return HPolytope(self._conormals, self._support, name=self.name, labels=labels)

    def _check_bounded(self) -> None:
        # ограничен ⟺ конус рецессии {d : ⟨ηᵢ,d⟩ ≤ 0} нулевой; его крайние лучи
        # задаются n−1 линейно независимыми активными ограничениями
        n = self._dim
        if rank(self._conormals, n) < n:
            raise UnboundedPolytopeError("Conormals do not span the space", {"rank": rank(self._conormals, n)})
        for subset in combinations(range(self.n_facets), n - 1):
            rows = [self._conormals[i] for i in subset]
            kernel = nullspace(rows, n)
            if len(kernel) != 1:
                continue
            direction = kernel[0]
            for sign in (1, -1):
                if all(sign * dot(eta, direction) <= 0 for eta in self._conormals):
                    raise UnboundedPolytopeError(
                        "Polytope is unbounded",
                        {"direction": [format_rational(sign * x) for x in direction]},
                    )

    def _scan_vertices(self) -> List[Tuple[Point, FrozenSet[int]]]:
        n = self._dim
        found: Dict[Point, FrozenSet[int]] = {}
        for subset in combinations(range(self.n_facets), n):
            rows = [self._conormals[i] for i in subset]
            if determinant(rows) == 0:
                continue
            solved = solve_linear(rows, [self._support[i] for i in subset])
            point = solved.solution
            if point in found:
                continue
            slacks = [self._support[i] - dot(eta, point) for i, eta in enumerate(self._conormals)]
            if any(s < 0 for s in slacks):
                continue
            found[point] = frozenset(i for i, s in enumerate(slacks) if s == 0)
        if not found:
            raise EmptyPolytopeError("Polytope is empty", {"kappa": [format_rational(k) for k in self._support]})
        return sorted(found.items())

    def _check_facets(self) -> None:
        n = self._dim
        points = [p for p, _ in self._raw]
        if _affine_rank(points, n) < n:
            raise EmptyPolytopeError("Polytope has empty interior")
        for i in range(self.n_facets):
            on_facet = [p for p, active in self._raw if i in active]
            if _affine_rank(on_facet, n) < n - 1:
                raise RedundantHalfspaceError(
                    "Half-space does not support a facet",
                    {"facet": i, "label": self._labels[i]},
                )

    @cached_property
    def vertices(self) -> Tuple[Vertex, ...]:
        """Вершины в лексикографическом порядке точек"""
        result = []
        for point, active in self._raw:
            if len(active) != self._dim:
                raise NonSimpleVertexError(
                    "Non-simple vertex",
                    {"point": [format_rational(x) for x in point], "facets": sorted(active)},
                )
            result.append(Vertex(point, tuple(sorted(active))))
        return tuple(result)

    @cached_property
    def simple(self) -> bool:
        return all(len(active) == self._dim for _, active in self._raw)

    @cached_property
    def lattice(self) -> Dict[IndexSet, Face]:
        """Все непустые грани, ключ - канонический набор фасет"""
        members: Dict[IndexSet, List[int]] = {}
        for vid, vertex in enumerate(self.vertices):
            for size in range(self._dim + 1):
                for subset in combinations(vertex.basis, size):
                    members.setdefault(frozenset(subset), []).append(vid)
        return {
            key: Face(key, tuple(sorted(vids)), self._dim - len(key))
            for key, vids in members.items()
        }

    def face(self, index_set: Iterable[int]) -> Optional[Face]:
        """Грань F_I или None, если пересечение пусто"""
        key = frozenset(index_set)
        if key in self.lattice:
            return self.lattice[key]
        bases = [frozenset(v.basis) for v in self.vertices if key <= frozenset(v.basis)]
        if not bases:
            return None
        return self.lattice[frozenset.intersection(*bases)]

    def neighbors(self, facet: int) -> List[int]:
        """Фасеты, пересекающие данную"""
        return [j for j in range(self.n_facets) if j != facet and self.face({facet, j}) is not None]

    def faces_of_dimension(self, k: int) -> List[Face]:
        faces = [f for f in self.lattice.values() if f.dimension == k]
        return sorted(faces, key=lambda f: sorted(f.index_set))

    def subfaces(self, face: Face) -> List[Face]:
        """Фасеты грани (грани на единицу меньшей размерности)"""
        result = []
        for j in range(self.n_facets):
            if j in face.index_set:
                continue
            sub = self.lattice.get(face.index_set | {j})
            if sub is not None and sub.dimension == face.dimension - 1:
                result.append(sub)
        return result

    def slack(self, facet: int, point: Sequence[Rational]) -> Fraction:
        return self._support[facet] - dot(self._conormals[facet], point)


def _affine_rank(points: Sequence[Sequence[Rational]], n: int) -> int:
    if not points:
        return -1
    base = points[0]
    return rank([[a - b for a, b in zip(p, base)] for p in points[1:]], n)


def vertices(polytope: HPolytope) -> Tuple[Vertex, ...]:
    return polytope.vertices


def face_lattice(polytope: HPolytope) -> List[Face]:
    return sorted(polytope.lattice.values(), key=lambda f: (-f.dimension, sorted(f.index_set)))


def face(polytope: HPolytope, index_set: Iterable[int]) -> Optional[Face]:
    return polytope.face(index_set)


def is_simple(polytope: HPolytope) -> bool:
    return polytope.simple


def vertex_determinant(polytope: HPolytope, vertex: Vertex) -> Fraction:
    return determinant([polytope.conormals[i] for i in vertex.basis])


def is_smooth(polytope: HPolytope) -> bool:
    """|det| активных конормалей равен 1 в каждой вершине"""
    if not polytope.simple:
        return False
    return all(abs(vertex_determinant(polytope, v)) == 1 for v in polytope.vertices)


def require_smooth(polytope: HPolytope) -> None:
    """
    Raises:
        NonSmoothError: с первой негладкой вершиной
    """
    for v in polytope.vertices:
        det = vertex_determinant(polytope, v)
        if abs(det) != 1:
            raise NonSmoothError(
                "Polytope is not smooth",
                {
                    "point": [format_rational(x) for x in v.point],
                    "facets": [polytope.labels[i] for i in v.basis],
                    "determinant": format_rational(det),
                },
            )


def vertex_pattern(polytope: HPolytope) -> FrozenSet[Tuple[int, ...]]:
    """Набор базисов вершин; для простых многогранников задает решетку граней"""
    return frozenset(v.basis for v in polytope.vertices)


def in_same_chamber(polytope: HPolytope, support: Sequence[Rational]) -> bool:
    """
    Проверка κ′ ∈ 𝒞_Δ по концам и середине отрезка [κ, κ′]
    """
    target = [to_rational(k) for k in support]
    if len(target) != polytope.n_facets:
        return False
    midpoint = [(a + b) / 2 for a, b in zip(polytope.support, target)]
    reference = vertex_pattern(polytope)
    for kappa in (target, midpoint):
        try:
            candidate = polytope.with_support(kappa)
            if not is_smooth(candidate) or vertex_pattern(candidate) != reference:
                return False
        except (EmptyPolytopeError, RedundantHalfspaceError, UnboundedPolytopeError):
            return False
    return True


def chamber_radius(polytope: HPolytope) -> Tuple[Fraction, ...]:
    """
    Радиус безопасного бокса вокруг κ внутри камеры

    Для вершины с базисом J и фасеты j ∉ J зазор κ_j − ⟨η_j, v⟩ меняется не
    более чем на r·(1 + ‖η_j A_J⁻¹‖₁) при |δκᵢ| ≤ r.

    Raises:
        NonSimpleVertexError: для несимплициального многогранника
    """
    best: Optional[Fraction] = None
    for v in polytope.vertices:
        basis = list(v.basis)
        inv = inverse([polytope.conormals[i] for i in basis])
        for j in range(polytope.n_facets):
            if j in v.basis:
                continue
            slack = polytope.slack(j, v.point)
            weights = [dot(polytope.conormals[j], column) for column in transpose(inv)]
            bound = 1 + sum(abs(w) for w in weights)
            ratio = slack / bound
            if best is None or ratio < best:
                best = ratio
    radius = (best if best is not None else Fraction(1)) / 2
    return tuple(radius for _ in range(polytope.n_facets))


def translate(polytope: HPolytope, shift: Sequence[Rational]) -> HPolytope:
    """κᵢ′ = κᵢ + ⟨ηᵢ, ξ⟩"""
    xi = [to_rational(x) for x in shift]
    if len(xi) != polytope.dim:
        raise ValidationError("Shift dimension mismatch", {"dim": polytope.dim, "shift": len(xi)})
    support = [k + dot(eta, xi) for eta, k in zip(polytope.conormals, polytope.support)]
    return HPolytope(polytope.conormals, support, name=polytope.name, labels=polytope.labels)


@dataclass(frozen=True)
class FacePresentation:
    """Грань как полноразмерный многогранник в решеточном базисе своего направления"""

    polytope: HPolytope
    face: Face
    facet_map: Tuple[int, ...]
    origin: Point
    basis: Tuple[Tuple[int, ...], ...]
    coordinate_facets: Tuple[int, ...]
    ambient_conormals: Tuple[IntVector, ...]

    def coordinates(self, point: Sequence[Rational]) -> Point:
        """yⱼ = −⟨ηⱼ, x − v⟩ по фасетам базиса вершины, не содержащим грань"""
        diff = [to_rational(a) - b for a, b in zip(point, self.origin)]
        return tuple(-dot(self.ambient_conormals[j], diff) for j in self.coordinate_facets)

    def lift(self, y: Sequence[Rational]) -> Point:
        point = list(self.origin)
        for coefficient, vector in zip(y, self.basis):
            point = [p + coefficient * e for p, e in zip(point, vector)]
        return tuple(point)


def face_polytope(polytope: HPolytope, index_set: Iterable[int]) -> FacePresentation:
    """
    Представить грань F_I как гладкий многогранник в ее решеточных координатах

    Raises:
        FaceError: пустое пересечение или вершина
        NonSmoothError: базис вершины не унимодулярен
    """
    face_ = polytope.face(index_set)
    if face_ is None:
        raise FaceError("Index set is not a face", {"index_set": sorted(index_set)})
    if face_.dimension == 0:
        raise FaceError("A vertex has no polytope presentation", {"index_set": sorted(face_.index_set)})
    anchor = polytope.vertices[face_.vertex_ids[0]]
    basis_facets = list(anchor.basis)
    inv = inverse([polytope.conormals[i] for i in basis_facets])
    if not is_integral(inv):
        raise NonSmoothError("Vertex basis is not unimodular", {"facets": basis_facets})
    columns = transpose(inv)
    free = [j for j in basis_facets if j not in face_.index_set]
    edge_vectors = tuple(tuple(-int(x) for x in columns[basis_facets.index(j)]) for j in free)

    normals: List[IntVector] = []
    support: List[Fraction] = []
    facet_map: List[int] = []
    labels: List[str] = []
    for sub in polytope.subfaces(face_):
        (facet,) = tuple(sub.index_set - face_.index_set)
        eta = polytope.conormals[facet]
        raw = tuple(int(dot(eta, e)) for e in edge_vectors)
        reduced = primitive(raw)
        scale = next(a // b for a, b in zip(raw, reduced) if b != 0)
        normals.append(reduced)
        support.append(polytope.slack(facet, anchor.point) / scale)
        facet_map.append(facet)
        labels.append(polytope.labels[facet])
    presented = HPolytope(normals, support, name=f"face{sorted(face_.index_set)}", labels=labels)
    result = FacePresentation(
        polytope=presented,
        face=face_,
        facet_map=tuple(facet_map),
        origin=anchor.point,
        basis=edge_vectors,
        coordinate_facets=tuple(free),
        ambient_conormals=polytope.conormals,
    )
    return result


@dataclass(frozen=True)
class LatticeMap:
    """Унимодулярная замена M (ηᵢ ↦ M ηᵢ) и сдвиг ξ во втором многограннике"""

    matrix: Tuple[Tuple[int, ...], ...]
    shift: Point


def lattice_equivalence(
    first: HPolytope,
    second: HPolytope,
    facet_map: Sequence[int],
) -> Optional[LatticeMap]:
    """
    Найти решеточно-аффинную эквивалентность при заданной биекции фасет

    Args:
        first: исходный многогранник
        second: образ
        facet_map: facet_map[i] - номер фасеты second, соответствующей фасете i

    Returns:
        LatticeMap или None
    """
    if first.dim != second.dim or first.n_facets != second.n_facets:
        return None
    if sorted(facet_map) != list(range(second.n_facets)):
        return None
    n = first.dim
    anchor = first.vertices[0].basis
    source = transpose([first.conormals[i] for i in anchor])
    target = transpose([second.conormals[facet_map[i]] for i in anchor])
    try:
        source_inv = inverse(source)
    except ValidationError:
        return None
    matrix = [[sum(target[r][m] * source_inv[m][c] for m in range(n)) for c in range(n)] for r in range(n)]
    if not is_integral(matrix) or abs(determinant(matrix)) != 1:
        return None
    int_matrix = tuple(tuple(int(x) for x in row) for row in matrix)
    for i, eta in enumerate(first.conormals):
        image = tuple(dot(row, eta) for row in int_matrix)
        if image != second.conormals[facet_map[i]]:
            return None
    rows = [second.conormals[facet_map[i]] for i in range(first.n_facets)]
    rhs = [second.support[facet_map[i]] - first.support[i] for i in range(first.n_facets)]
    solved = solve_linear(rows, rhs, n)
    if solved is None:
        return None
    return LatticeMap(int_matrix, solved.solution)


def find_lattice_equivalence(
    first: HPolytope,
    second: HPolytope,
) -> Optional[Tuple[Tuple[int, ...], LatticeMap]]:
    """
    Поиск эквивалентности без заданной биекции фасет

    Базис первой вершины first переводится во все упорядоченные базисы вершин
    second; остальные фасеты сопоставляются по образам конормалей.
    """
    if first.dim != second.dim or first.n_facets != second.n_facets:
        return None
    n = first.dim
    anchor = first.vertices[0].basis
    try:
        source_inv = inverse(transpose([first.conormals[i] for i in anchor]))
    except ValidationError:
        return None
    lookup = {eta: j for j, eta in enumerate(second.conormals)}
    seen = set()
    for w in second.vertices:
        for ordered in permutations(w.basis):
            if ordered in seen:
                continue
            seen.add(ordered)
            target = transpose([second.conormals[j] for j in ordered])
            matrix = [[sum(target[r][m] * source_inv[m][c] for m in range(n)) for c in range(n)] for r in range(n)]
            if not is_integral(matrix):
                continue
            facet_map = []
            for eta in first.conormals:
                image = tuple(int(dot(row, eta)) for row in matrix)
                if image not in lookup:
                    break
                facet_map.append(lookup[image])
            else:
                found = lattice_equivalence(first, second, facet_map)
                if found is not None:
                    return tuple(facet_map), found
    return None

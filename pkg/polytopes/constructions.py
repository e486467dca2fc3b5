"""Конструкции: симплексы, произведения, расслоения, расширения, раздутия и пространства массово линейных функций"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

import structlog

from polytopes.errors import (
    BlowupError,
    ChamberError,
    DimensionError,
    EmptyPolytopeError,
    FaceError,
    NonSimpleVertexError,
    NonSmoothError,
    RedundantHalfspaceError,
    UnboundedPolytopeError,
    ValidationError,
)
from polytopes.masslinear import equivalence_classes
from polytopes.measure import volume_poly
from polytopes.polytope_core import HPolytope, IndexSet, is_smooth, require_smooth
from polytopes.rational_kernel import (
    IntVector,
    MultiPoly,
    Rational,
    dot,
    format_rational,
    nullspace,
    primitive,
    rref,
    to_rational,
)

logger = structlog.get_logger()


def _unit(n: int, i: int, sign: int = 1) -> IntVector:
    return tuple(sign if j == i else 0 for j in range(n))


def _smooth(polytope: HPolytope) -> HPolytope:
    require_smooth(polytope)
    return polytope


# ---------- базовые многогранники ----------


def simplex(n: int, size: Rational = 1) -> HPolytope:
    """Стандартный Δₙ: ηᵢ = −eᵢ, η_{n+1} = Σeᵢ"""
    if n < 1:
        raise DimensionError("Simplex dimension must be positive", {"n": n})
    conormals = [_unit(n, i, -1) for i in range(n)] + [tuple(1 for _ in range(n))]
    support = [0] * n + [to_rational(size)]
    return _smooth(HPolytope(conormals, support, name=f"simplex{n}"))


def segment(length: Rational = 1) -> HPolytope:
    return simplex(1, length)


def product(first: HPolytope, second: HPolytope) -> HPolytope:
    """Δ_A × Δ_B; метки второго сомножителя получают штрих при совпадении"""
    n, m = first.dim, second.dim
    conormals = [tuple(eta) + (0,) * m for eta in first.conormals]
    conormals += [(0,) * n + tuple(eta) for eta in second.conormals]
    support = list(first.support) + list(second.support)
    clash = set(first.labels) & set(second.labels)
    labels = list(first.labels) + [f"{label}'" if clash else label for label in second.labels]
    name = f"{first.name or 'A'}x{second.name or 'B'}"
    return HPolytope(conormals, support, name=name, labels=labels)


def box(n: int = 2, lengths: Optional[Sequence[Rational]] = None) -> HPolytope:
    """Прямоугольный бокс с конормалями (−e₁, e₁, −e₂, e₂, …)"""
    lengths = list(lengths) if lengths is not None else [1] * n
    if len(lengths) != n:
        raise ValidationError("Box needs one length per axis", {"n": n, "lengths": len(lengths)})
    conormals = []
    support = []
    for i, length in enumerate(lengths):
        conormals += [_unit(n, i, -1), _unit(n, i)]
        support += [0, to_rational(length)]
    return _smooth(HPolytope(conormals, support, name=f"box{n}"))


def polygon(conormals: Sequence[Sequence[int]], support: Sequence[Rational], name: Optional[str] = None) -> HPolytope:
    """
    Гладкий многоугольник с ребрами в порядке смежности

    Raises:
        ValidationError: соседние по номеру ребра не пересекаются
    """
    result = HPolytope(conormals, support, name=name or "polygon")
    if result.dim != 2:
        raise DimensionError("Polygon must be two-dimensional", {"dim": result.dim})
    require_smooth(result)
    k = result.n_facets
    for i in range(k):
        if result.face({i, (i + 1) % k}) is None:
            raise ValidationError("Polygon edges are not in adjacency order", {"edge": i, "next": (i + 1) % k})
    return result


def trapezoid(support: Sequence[Rational] = (0, 0, 2, -1)) -> HPolytope:
    """Трапеция с конормалями (−1,0), (0,−1), (1,1), (−1,−1)"""
    return _smooth(HPolytope([(-1, 0), (0, -1), (1, 1), (-1, -1)], support, name="trapezoid"))


# ---------- расслоения ----------


def yk_conormals(k: int, a: Sequence[int]) -> List[IntVector]:
    """Конормали Δ_k-расслоения над Δ₁ с закруткой a"""
    if len(a) != k:
        raise ValidationError("Twist vector length must equal k", {"k": k, "a": len(a)})
    n = k + 1
    conormals = [_unit(n, i, -1) for i in range(k)]
    conormals.append(tuple(1 for _ in range(k)) + (0,))
    conormals.append(_unit(n, k, -1))
    conormals.append(tuple(int(x) for x in a) + (1,))
    return conormals


@dataclass(frozen=True)
class BundleSpecYk:
    k: int
    a: Tuple[int, ...]
    kappa: Tuple[Fraction, ...]

    @property
    def fiber_size(self) -> Fraction:
        return sum(self.kappa[: self.k + 1], Fraction(0))

    @property
    def height(self) -> Fraction:
        return dot(self.a, self.kappa[: self.k]) + self.kappa[self.k + 1] + self.kappa[self.k + 2]

    def in_chamber(self) -> bool:
        lam = self.fiber_size
        return lam > 0 and self.height > max([0] + list(self.a)) * lam


def bundle_Yk(spec: BundleSpecYk) -> HPolytope:
    """
    Δ_k-расслоение над Δ₁: фасеты слоя F1..F_{k+1}, затем G1, G2

    Raises:
        ChamberError: κ вне камеры семейства
    """
    if len(spec.kappa) != spec.k + 3:
        raise ValidationError("Support vector must have k+3 entries", {"k": spec.k, "kappa": len(spec.kappa)})
    if not spec.in_chamber():
        raise ChamberError(
            "Support vector outside the bundle chamber",
            {
                "fiber_size": format_rational(spec.fiber_size),
                "height": format_rational(spec.height),
                "a": list(spec.a),
            },
        )
    labels = [f"F{i + 1}" for i in range(spec.k + 1)] + ["G1", "G2"]
    name = f"Y{spec.k}({','.join(str(x) for x in spec.a)})"
    result = HPolytope(yk_conormals(spec.k, spec.a), spec.kappa, name=name, labels=labels)
    require_smooth(result)
    return result


def make_yk(k: int, a: Sequence[int], kappa: Sequence[Rational]) -> HPolytope:
    return bundle_Yk(BundleSpecYk(k, tuple(int(x) for x in a), tuple(to_rational(x) for x in kappa)))


BUNDLE_121_LABELS = ("F0", "F1", "F2", "F3", "F4", "F5", "F6")


@dataclass(frozen=True)
class BundleSpec121:
    a: Tuple[int, int, int]
    d: int
    kappa: Tuple[Fraction, ...]


def bundle_121_conormals(a: Sequence[int], d: int) -> List[IntVector]:
    a1, a2, a3 = (int(x) for x in a)
    return [
        (1, 0, 0, 0),
        (-1, 0, 0, 0),
        (0, -1, 0, 0),
        (0, 0, -1, 0),
        (d, 1, 1, 0),
        (0, 0, 0, -1),
        (a1, a2, a3, 1),
    ]


def bundle_121(spec: BundleSpec121) -> HPolytope:
    """
    Δ₁-расслоение над Δ₂-расслоением над Δ₁, фасеты F0..F6

    Raises:
        ValidationError: d < 0 или неверная длина κ
        NonSmoothError: с первой негладкой вершиной
        ChamberError: комбинаторика отличается от Δ₁ × Δ₂ × Δ₁
    """
    if spec.d < 0:
        raise ValidationError("Twist d must be nonnegative", {"d": spec.d})
    if len(spec.a) != 3 or len(spec.kappa) != 7:
        raise ValidationError("Expected a in Z^3 and seven support numbers", {"a": len(spec.a), "kappa": len(spec.kappa)})
    name = f"Z121(d={spec.d},a={','.join(str(x) for x in spec.a)})"
    try:
        result = HPolytope(bundle_121_conormals(spec.a, spec.d), spec.kappa, name=name, labels=BUNDLE_121_LABELS)
    except (EmptyPolytopeError, RedundantHalfspaceError) as e:
        raise ChamberError("Support vector does not give a 121 bundle", {"reason": e.code})
    require_smooth(result)
    if len(result.vertices) != 12:
        raise ChamberError("121 bundle must have twelve vertices", {"vertices": len(result.vertices)})
    return result


@dataclass(frozen=True)
class BundleSpecD2Polygon:
    """Δ₂-расслоение над многоугольником; kappa: 3 числа слоя и k чисел базы"""

    base: HPolytope
    twists: Tuple[Tuple[int, int], ...]
    kappa: Optional[Tuple[Fraction, ...]] = None

    def support(self) -> Tuple[Fraction, ...]:
        if self.kappa is not None:
            return self.kappa
        return (Fraction(0), Fraction(0), Fraction(1)) + tuple(self.base.support)


D2_FIBER_CONORMALS = ((-1, 0, 0, 0), (0, -1, 0, 0), (1, 1, 0, 0))


def bundle_D2_polygon(spec: BundleSpecD2Polygon, name: Optional[str] = None) -> HPolytope:
    """
    Фасеты слоя (−1,0,0,0), (0,−1,0,0), (1,1,0,0), затем базовые (bⁱ, η̂ᵢ)

    Raises:
        ValidationError: b¹ или b² ненулевые, неверные длины
        NonSmoothError: негладкая комбинация параметров
        ChamberError: комбинаторика не Δ₂ × многоугольник
    """
    base = spec.base
    if base.dim != 2:
        raise DimensionError("Base must be a polygon", {"dim": base.dim})
    k = base.n_facets
    if len(spec.twists) != k:
        raise ValidationError("One twist per base edge required", {"edges": k, "twists": len(spec.twists)})
    if tuple(spec.twists[0]) != (0, 0) or tuple(spec.twists[1]) != (0, 0):
        raise ValidationError("Twists of the first two edges must vanish", {"twists": [list(t) for t in spec.twists[:2]]})
    support = spec.support()
    if len(support) != 3 + k:
        raise ValidationError("Support vector must have 3 + k entries", {"k": k, "kappa": len(support)})
    conormals = list(D2_FIBER_CONORMALS)
    for (b1, b2), eta in zip(spec.twists, base.conormals):
        conormals.append((int(b1), int(b2)) + tuple(eta))
    labels = ["F1", "F2", "F3"] + [f"G{i + 1}" for i in range(k)]
    try:
        result = HPolytope(conormals, support, name=name or f"D2over{base.name or 'polygon'}", labels=labels)
    except (EmptyPolytopeError, RedundantHalfspaceError) as e:
        raise ChamberError("Support vector does not give a polygon bundle", {"reason": e.code})
    require_smooth(result)
    if len(result.vertices) != 3 * k:
        raise ChamberError("Polygon bundle must have 3k vertices", {"vertices": len(result.vertices), "k": k})
    return result


# ---------- расширения ----------


def expansion(core: HPolytope, facet: int, fold: int = 1) -> HPolytope:
    """
    k-кратное расширение вдоль фасеты j

    Фасеты типа слоя (η̃ᵢ, 0) с κ̃ᵢ для i ≠ j идут первыми; затем базовые
    (0, −eᵢ) с нулевыми κ и (η̃_j, Σeᵢ) с κ̃_j, метки B1..B_{k+1}.
    """
    require_smooth(core)
    if not 0 <= facet < core.n_facets:
        raise ValidationError("Facet index out of range", {"facet": facet, "facets": core.n_facets})
    if fold < 1:
        raise ValidationError("Expansion fold must be positive", {"fold": fold})
    conormals: List[IntVector] = []
    support: List[Fraction] = []
    labels: List[str] = []
    for i, eta in enumerate(core.conormals):
        if i == facet:
            continue
        conormals.append(tuple(eta) + (0,) * fold)
        support.append(core.support[i])
        labels.append(core.labels[i])
    for i in range(fold):
        conormals.append((0,) * core.dim + _unit(fold, i, -1))
        support.append(Fraction(0))
        labels.append(f"B{i + 1}")
    conormals.append(tuple(core.conormals[facet]) + (1,) * fold)
    support.append(core.support[facet])
    labels.append(f"B{fold + 1}")
    name = f"exp{fold}({core.name or 'core'},{core.labels[facet]})"
    return _smooth(HPolytope(conormals, support, name=name, labels=labels))


def double_expansion(core: HPolytope, first: int, second: int, name: Optional[str] = None) -> HPolytope:
    """
    Двойное расширение вдоль фасет j₁ ≠ j₂

    Порядок: фасеты типа слоя, затем (0,−e₁) 0, (η̃_{j₁}, e₁) κ̃_{j₁},
    (0,−e₂) 0, (η̃_{j₂}, e₂) κ̃_{j₂}.
    """
    require_smooth(core)
    if first == second:
        raise ValidationError("Double expansion needs two distinct facets", {"facet": first})
    for j in (first, second):
        if not 0 <= j < core.n_facets:
            raise ValidationError("Facet index out of range", {"facet": j, "facets": core.n_facets})
    conormals: List[IntVector] = []
    support: List[Fraction] = []
    labels: List[str] = []
    for i, eta in enumerate(core.conormals):
        if i in (first, second):
            continue
        conormals.append(tuple(eta) + (0, 0))
        support.append(core.support[i])
        labels.append(core.labels[i])
    for position, j in enumerate((first, second)):
        conormals.append((0,) * core.dim + _unit(2, position, -1))
        support.append(Fraction(0))
        conormals.append(tuple(core.conormals[j]) + _unit(2, position))
        support.append(core.support[j])
        labels += [f"B{2 * position + 1}", f"B{2 * position + 2}"]
    name = name or f"dexp({core.name or 'core'},{core.labels[first]},{core.labels[second]})"
    return _smooth(HPolytope(conormals, support, name=name, labels=labels))


# ---------- раздутия ----------


def _next_exceptional_label(labels: Sequence[str]) -> str:
    used = [int(label[1:]) for label in labels if label.startswith("E") and label[1:].isdigit()]
    return f"E{max(used, default=0) + 1}"


def blowup_slack(polytope: HPolytope, index_set: Iterable[int]) -> Fraction:
    """Минимум Σκ_I − ⟨η₀, v⟩ по вершинам вне F_I"""
    members = sorted(set(index_set))
    eta0 = tuple(sum(polytope.conormals[i][axis] for i in members) for axis in range(polytope.dim))
    total = sum((polytope.support[i] for i in members), Fraction(0))
    values = [total - dot(eta0, v.point) for v in polytope.vertices if not set(members) <= set(v.basis)]
    if not values:
        raise FaceError("Face contains every vertex", {"index_set": members})
    return min(values)


def blowup(
    polytope: HPolytope,
    index_set: Iterable[int],
    eps: Optional[Rational] = None,
    position: Optional[int] = None,
    label: Optional[str] = None,
) -> HPolytope:
    """
    Раздутие вдоль грани F_I

    Args:
        polytope: гладкий многогранник
        index_set: фасеты, задающие грань коразмерности ≥ 2
        eps: размер; по умолчанию половина допустимого максимума
        position: место новой фасеты (по умолчанию последняя)
        label: метка новой фасеты (по умолчанию E<n>)

    Raises:
        FaceError: I не грань или коразмерность < 2
        BlowupError: ε вне (0, максимум)
    """
    require_smooth(polytope)
    members = sorted(set(index_set))
    face_ = polytope.face(members)
    if face_ is None or face_.index_set != frozenset(members):
        raise FaceError("Index set does not define a face", {"index_set": [polytope.labels[i] for i in members]})
    if len(members) < 2:
        raise FaceError("Blowup needs a face of codimension at least two", {"codimension": len(members)})
    limit = blowup_slack(polytope, members)
    size = limit / 2 if eps is None else to_rational(eps)
    if not 0 < size < limit:
        raise BlowupError(
            "Blowup size not admissible",
            {"eps": format_rational(size), "limit": format_rational(limit)},
        )
    eta0 = tuple(sum(polytope.conormals[i][axis] for i in members) for axis in range(polytope.dim))
    kappa0 = sum((polytope.support[i] for i in members), Fraction(0)) - size
    conormals = list(polytope.conormals)
    support = list(polytope.support)
    labels = list(polytope.labels)
    where = len(conormals) if position is None else position
    if not 0 <= where <= len(conormals):
        raise ValidationError("Insertion position out of range", {"position": where})
    conormals.insert(where, eta0)
    support.insert(where, kappa0)
    labels.insert(where, label or _next_exceptional_label(labels))
    result = HPolytope(conormals, support, name=polytope.name, labels=labels)
    if not is_smooth(result):
        raise BlowupError("Blowup is not smooth", {"index_set": members})
    logger.debug(
        "Blowup performed",
        name=polytope.name,
        face=[polytope.labels[i] for i in members],
        eps=format_rational(size),
    )
    return result


@dataclass(frozen=True)
class BlowdownCandidate:
    """Набор I в координатах полученного многогранника и размер ε"""

    index_set: Tuple[int, ...]
    eps: Fraction


@dataclass(frozen=True)
class BlowdownResult:
    facet: int
    polytope: Optional[HPolytope]
    index_set: Optional[Tuple[int, ...]]
    eps: Optional[Fraction]
    candidates: Tuple[BlowdownCandidate, ...] = ()
    violation: Optional[str] = None

    @property
    def success(self) -> bool:
        return self.polytope is not None


def _blowdown_candidate(polytope: HPolytope, facet: int, members: Tuple[int, ...]) -> Tuple[Optional[BlowdownCandidate], str, Optional[HPolytope]]:
    # условие (i): F_{I∪p} пусто, а F_{(I∖i)∪p} нет
    if polytope.face(set(members) | {facet}) is not None:
        return None, "condition_i", None
    for i in members:
        if polytope.face((set(members) - {i}) | {facet}) is None:
            return None, "condition_i", None

    keep = [j for j in range(polytope.n_facets) if j != facet]
    try:
        reduced = HPolytope(
            [polytope.conormals[j] for j in keep],
            [polytope.support[j] for j in keep],
            name=polytope.name,
            labels=[polytope.labels[j] for j in keep],
        )
        if not is_smooth(reduced):
            return None, "condition_iii", None
    except (EmptyPolytopeError, RedundantHalfspaceError, UnboundedPolytopeError, NonSimpleVertexError):
        return None, "condition_iii", None

    shifted = tuple(j if j < facet else j - 1 for j in members)
    eps = sum((polytope.support[j] for j in members), Fraction(0)) - polytope.support[facet]
    if eps <= 0 or reduced.face(shifted) is None:
        return None, "condition_iii", None
    try:
        rebuilt = blowup(reduced, shifted, eps, position=facet, label=polytope.labels[facet])
    except (FaceError, BlowupError, NonSmoothError):
        return None, "condition_iii", None
    if rebuilt != polytope:
        return None, "condition_iii", None
    return BlowdownCandidate(tuple(sorted(shifted)), eps), "", reduced


def blowdown(polytope: HPolytope, facet: int) -> BlowdownResult:
    """
    Стянуть фасету, если она исключительный дивизор раздутия

    Кандидаты I: подмножества соседей с Σ η_I = η_p; для каждого проверяются
    условия (i) и (iii). Неудача возвращается как результат с первым
    нарушенным условием.
    """
    require_smooth(polytope)
    if not 0 <= facet < polytope.n_facets:
        raise ValidationError("Facet index out of range", {"facet": facet})
    target = polytope.conormals[facet]
    neighbors = polytope.neighbors(facet)
    found: List[Tuple[BlowdownCandidate, HPolytope]] = []
    violation: Optional[str] = None
    matched = False
    for size in range(2, polytope.dim + 1):
        for members in combinations(neighbors, size):
            total = tuple(sum(polytope.conormals[i][axis] for i in members) for axis in range(polytope.dim))
            if total != target:
                continue
            matched = True
            candidate, reason, reduced = _blowdown_candidate(polytope, facet, members)
            if candidate is None:
                violation = violation or reason
                continue
            found.append((candidate, reduced))
    if not matched:
        violation = "condition_ii"
    if not found:
        return BlowdownResult(facet, None, None, None, (), violation)
    (first, reduced) = found[0]
    if len(found) > 1:
        logger.info(
            "Several blowdown faces",
            name=polytope.name,
            facet=polytope.labels[facet],
            faces=[list(c.index_set) for c, _ in found],
        )
    return BlowdownResult(facet, reduced, first.index_set, first.eps, tuple(c for c, _ in found), None)


def vertex_blowup_preserves(polytope: HPolytope, gamma: Sequence[Fraction], vertex_facets: Iterable[int]) -> bool:
    """Раздутие вершины сохраняет массовую линейность ⟺ вершина на всех асимметричных фасетах"""
    members = set(vertex_facets)
    if len(members) != polytope.dim or polytope.face(members) is None:
        raise FaceError("Index set is not a vertex", {"index_set": sorted(members)})
    return all(i in members for i, g in enumerate(gamma) if g != 0)


def edge_blowup_preserves(polytope: HPolytope, gamma: Sequence[Fraction], edge_facets: Iterable[int]) -> bool:
    """В размерности 4: ребро пересекает все асимметричные фасеты и Σγ_I = 0"""
    if polytope.dim != 4:
        raise DimensionError("Edge criterion holds in dimension four", {"dim": polytope.dim})
    members = frozenset(edge_facets)
    edge = polytope.face(members)
    if edge is None or edge.dimension != 1 or edge.index_set != members:
        raise FaceError("Index set is not an edge", {"index_set": sorted(members)})
    if sum((gamma[i] for i in members), Fraction(0)) != 0:
        return False
    for i, g in enumerate(gamma):
        if g != 0 and i not in members and polytope.face(members | {i}) is None:
            return False
    return True


# ---------- пространства массово линейных функций ----------


@dataclass(frozen=True)
class MassLinearSpace:
    """
    Базис массово линейных функций семейства

    Векторы γ задают H = Σγᵢηᵢ; inessential - базис подпространства
    несущественных функций в тех же координатах.
    """

    family: str
    conormals: Tuple[IntVector, ...]
    basis: Tuple[Tuple[Fraction, ...], ...]
    inessential: Tuple[Tuple[Fraction, ...], ...]
    details: dict = field(default_factory=dict)

    def functional(self, gamma: Sequence[Rational]) -> Tuple[Fraction, ...]:
        n = len(self.conormals[0])
        return tuple(
            sum((to_rational(g) * eta[axis] for g, eta in zip(gamma, self.conormals)), Fraction(0))
            for axis in range(n)
        )

    @property
    def functionals(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(self.functional(g) for g in self.basis)

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _echelon(vectors: Sequence[Sequence[Rational]], width: int) -> Tuple[Tuple[Fraction, ...], ...]:
    if not vectors:
        return ()
    reduced, pivots = rref(vectors, width)
    return tuple(tuple(Fraction(x) for x in row) for row in reduced[: len(pivots)])


def _solution_space(constraints: Sequence[Sequence[Rational]], width: int) -> Tuple[Tuple[Fraction, ...], ...]:
    return _echelon(nullspace(constraints, width), width)


def _indicator(width: int, members: Iterable[int], values: Optional[Sequence[Rational]] = None) -> List[Rational]:
    row: List[Rational] = [0] * width
    for position, i in enumerate(members):
        row[i] = values[position] if values is not None else 1
    return row


def ml_space_Yk(a: Sequence[int]) -> MassLinearSpace:
    """
    γ с γ_{k+2} + γ_{k+3} = 0, Σ_{i≤k+1} γᵢ = 0, Σ aᵢγᵢ = 0

    Несущественные: дополнительно Σ_{aᵢ=α} γᵢ = 0 для каждого α (a_{k+1} = 0).
    """
    k = len(a)
    width = k + 3
    constraints = [
        _indicator(width, [k + 1, k + 2]),
        _indicator(width, range(k + 1)),
        _indicator(width, range(k), a),
    ]
    basis = _solution_space(constraints, width)
    extended = list(constraints)
    slopes = list(a) + [0]
    for alpha in sorted(set(slopes)):
        extended.append(_indicator(width, [i for i, s in enumerate(slopes) if s == alpha]))
    inessential = _solution_space(extended, width)
    return MassLinearSpace("bundle-yk", tuple(yk_conormals(k, a)), basis, inessential, {"a": list(a)})


def ml_space_121(a: Sequence[int], d: int) -> MassLinearSpace:
    """
    γ₀ + γ₁ = 0, dγ₀ = a₁γ₀ = 0, γ₂ + γ₃ + γ₄ = 0, a₂γ₂ + a₃γ₃ = 0, γ₅ + γ₆ = 0

    Несущественны: γ₂ = γ₃ = γ₄ = 0 при a₂a₃(a₂ − a₃) ≠ 0, иначе все.
    """
    a1, a2, a3 = (int(x) for x in a)
    width = 7
    constraints = [
        _indicator(width, [0, 1]),
        _indicator(width, [0], [d]),
        _indicator(width, [0], [a1]),
        _indicator(width, [2, 3, 4]),
        _indicator(width, [2, 3], [a2, a3]),
        _indicator(width, [5, 6]),
    ]
    basis = _solution_space(constraints, width)
    if a2 * a3 * (a2 - a3) != 0:
        extended = constraints + [_indicator(width, [i]) for i in (2, 3, 4)]
        inessential = _solution_space(extended, width)
    else:
        inessential = basis
    return MassLinearSpace(
        "bundle-121",
        tuple(bundle_121_conormals(a, d)),
        basis,
        inessential,
        {"a": [a1, a2, a3], "d": d},
    )


def area_polynomial(base: HPolytope) -> MultiPoly:
    """Площадь многоугольника как многочлен от κ̂ на его камере"""
    if base.dim != 2:
        raise DimensionError("Area polynomial is defined for polygons", {"dim": base.dim})
    return volume_poly(base)


def lift_functional(
    bundle: HPolytope,
    base_facets: Sequence[int],
    base_gamma: Sequence[Rational],
) -> Tuple[Fraction, ...]:
    """Подъем H = Σ βᵢ η̂ᵢ′ по коэффициентам β массово линейной функции базы"""
    if len(base_facets) != len(base_gamma):
        raise ValidationError("One coefficient per base facet required", {"facets": len(base_facets), "gamma": len(base_gamma)})
    return tuple(
        sum((to_rational(b) * bundle.conormals[i][axis] for i, b in zip(base_facets, base_gamma)), Fraction(0))
        for axis in range(bundle.dim)
    )


def _fiber_direction(twists: Sequence[Tuple[int, int]]) -> Optional[Tuple[Tuple[int, int], List[Fraction]]]:
    nonzero = [tuple(t) for t in twists if tuple(t) != (0, 0)]
    if not nonzero:
        return (0, 0), [Fraction(0)] * len(twists)
    u, v = primitive(nonzero[0])
    ratios = []
    for b1, b2 in twists:
        if b1 * v != b2 * u:
            return None
        ratios.append(Fraction(b1, u) if u != 0 else Fraction(b2, v))
    return (u, v), ratios


def ml_space_D2_polygon(spec: BundleSpecD2Polygon) -> MassLinearSpace:
    """
    Функции слоя H̃ = Σγᵢηᵢ плюс подъемы несущественных функций базы

    Ненулевые bⁱ должны быть параллельны (u, v); тогда γ ∝ (−v, u, v − u)
    и H̃ массово линейна, если P(0,0,r₃,…,r_k) = 0 или γ₁γ₂γ₃ = 0.
    """
    base = spec.base
    k = base.n_facets
    width = 3 + k
    basis: List[List[Rational]] = []
    inessential: List[List[Rational]] = []
    details: dict = {}

    direction = _fiber_direction(spec.twists)
    if direction is None:
        details["fiber"] = "twists not parallel"
    else:
        (u, v), ratios = direction
        if (u, v) == (0, 0):
            fiber = [[1, -1, 0] + [0] * k, [0, 1, -1] + [0] * k]
            basis += fiber
            inessential += fiber
            details["fiber"] = "trivial bundle"
        else:
            gamma = [-v, u, v - u] + [0] * k
            area = area_polynomial(base).evaluate(ratios)
            details["area_at_ratios"] = format_rational(area)
            details["ratios"] = [format_rational(r) for r in ratios]
            product_ = gamma[0] * gamma[1] * gamma[2]
            if area == 0 or product_ == 0:
                basis.append(gamma)
                if product_ == 0:
                    inessential.append(gamma)

    for members in equivalence_classes(base).nontrivial():
        last = members[-1]
        for i in members[:-1]:
            row = [0] * width
            row[3 + i] = 1
            row[3 + last] = -1
            basis.append(row)
            inessential.append(row)

    conormals = tuple(D2_FIBER_CONORMALS) + tuple(
        (int(b1), int(b2)) + tuple(eta) for (b1, b2), eta in zip(spec.twists, base.conormals)
    )
    return MassLinearSpace(
        "bundle-d2-polygon",
        conormals,
        _echelon(basis, width),
        _echelon(inessential, width),
        details,
    )


# ---------- семейства минимальных многогранников ----------


def polygon_blowup_chain(k: int) -> HPolytope:
    """
    Многоугольник с k ребрами: Δ₂, раздутие e₁ ∩ e₃, затем каждый раз (новое ребро) ∩ e₁

    Ребра e₁..e_k идут в порядке смежности; eⱼ = (−(j−4), 1) при j ≥ 4.
    """
    if k < 3:
        raise DimensionError("Polygon chain needs at least three edges", {"k": k})
    scale = 12 * k
    side = scale * (k - 2) * (k - 1) // 2
    result = HPolytope([(-1, 0), (0, -1), (1, 1)], [0, 0, side], name=f"chain{k}", labels=["e1", "e2", "e3"])
    previous = 2
    for j in range(4, k + 1):
        result = blowup(result, [0, previous], eps=(k - j + 1) * scale, label=f"e{j}")
        previous = j - 1
    return result.with_labels([f"e{i + 1}" for i in range(k)])


def minimal_family_a3_twists(k: int) -> Tuple[Tuple[int, int], ...]:
    ratios = [0, 0] + [1] * (k - 3) + [2]
    return tuple((r, -r) for r in ratios)


def minimal_family_a3(N: int) -> HPolytope:
    """Минимальное Δ₂-расслоение над многоугольником с N фасетами и существенной функцией"""
    if N < 7:
        raise DimensionError("Family a3 starts at seven facets", {"N": N})
    k = N - 3
    base = polygon_blowup_chain(k)
    return bundle_D2_polygon(BundleSpecD2Polygon(base, minimal_family_a3_twists(k)), name=f"minimal_a3({N})")


def minimal_family_a3_functional(N: int) -> Tuple[int, ...]:
    """H = η₁ + η₂ − 2η₃ при γ = (1, 1, −2)"""
    if N < 7:
        raise DimensionError("Family a3 starts at seven facets", {"N": N})
    return (-3, -3, 0, 0)


def _family_b_edges(k: int) -> Tuple[int, int]:
    if k == 5:
        return 4, 0
    return k - 1, k - 3


def minimal_family_b(N: int) -> HPolytope:
    """Минимальное двойное расширение многоугольника с N фасетами"""
    if N < 5:
        raise DimensionError("Family b starts at five facets", {"N": N})
    k = N - 2
    core = polygon_blowup_chain(k)
    first, second = _family_b_edges(k)
    return double_expansion(core, first, second, name=f"minimal_b({N})")


def minimal_family_b_functional(N: int) -> Tuple[int, ...]:
    """γ = (1, −1, −1, 1) на базовых фасетах: H = (η̃_{j₂} − η̃_{j₁}, −2, 2)"""
    if N < 5:
        raise DimensionError("Family b starts at five facets", {"N": N})
    k = N - 2
    core = polygon_blowup_chain(k)
    first, second = _family_b_edges(k)
    diff = tuple(b - a for a, b in zip(core.conormals[first], core.conormals[second]))
    return diff + (-2, 2)


def face_index_set(polytope: HPolytope, labels_or_indices: Sequence) -> IndexSet:
    """Перевести метки фасет или номера в набор индексов"""
    result = set()
    for item in labels_or_indices:
        if isinstance(item, int) and not isinstance(item, bool):
            if not 0 <= item < polytope.n_facets:
                raise ValidationError("Facet index out of range", {"facet": item})
            result.add(item)
        elif item in polytope.labels:
            result.add(polytope.labels.index(item))
        else:
            raise ValidationError("Unknown facet label", {"label": item, "labels": list(polytope.labels)})
    return frozenset(result)

"""Набор примеров (Δ, H): три семейства расслоений, расширения и их раздутия"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

import structlog

from polytopes.constructions import (
    BundleSpec121,
    BundleSpecD2Polygon,
    BundleSpecYk,
    MassLinearSpace,
    blowup,
    bundle_121,
    bundle_D2_polygon,
    bundle_Yk,
    expansion,
    ml_space_121,
    ml_space_D2_polygon,
    ml_space_Yk,
    polygon_blowup_chain,
    simplex,
    trapezoid,
    vertex_blowup_preserves,
)
from polytopes.errors import PolytopeError
from polytopes.masslinear import equivalence_classes
from polytopes.polytope_core import HPolytope

logger = structlog.get_logger()

YK_TWISTS = {
    2: ((0, 0), (1, 0), (1, 1), (1, 2), (2, -1)),
    3: ((1, 1, 0), (0, 0, 0), (1, 0, 0), (2, 1, 0), (1, -1, 0)),
}
YK_SIZES = ((1, 3), (1, 5), (2, 7))

BUNDLE_121_PARAMETERS = (
    ((0, 0, 0), 0),
    ((0, 1, 1), 0),
    ((0, 1, 2), 0),
    ((1, 1, 2), 0),
    ((0, 1, 2), 1),
    ((0, 0, 1), 1),
)

D2_TWISTS = tuple((b1, b2) for b1 in (-1, 0, 1, 2) for b2 in (-1, 0, 1, 2))


@dataclass(frozen=True)
class SuiteEntry:
    """
    Пара (Δ, H)

    gamma задан, когда коэффициенты известны из формулы семейства.
    """

    name: str
    polytope: HPolytope
    functional: Tuple[int, ...]
    gamma: Optional[Tuple[Fraction, ...]] = None


def integral_functional(vector: Sequence[Fraction]) -> Tuple[int, ...]:
    """Наименьшее целое кратное рационального вектора"""
    values = [Fraction(x) for x in vector]
    scale = reduce(lcm, (v.denominator for v in values), 1)
    ints = [int(v * scale) for v in values]
    common = reduce(gcd, ints, 0) or 1
    return tuple(x // common for x in ints)


def _scale_gamma(gamma: Sequence[Fraction], functional: Sequence[int], reference: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    axis = next(i for i, x in enumerate(reference) if x != 0)
    factor = Fraction(functional[axis]) / reference[axis]
    return tuple(g * factor for g in gamma)


def _space_entries(name: str, polytope: HPolytope, space: MassLinearSpace) -> List[SuiteEntry]:
    entries = []
    for gamma, h in zip(space.basis, space.functionals):
        if not any(h):
            continue
        functional = integral_functional(h)
        entries.append(SuiteEntry(name, polytope, functional, _scale_gamma(gamma, functional, h)))
    return entries


def _generic_entry(name: str, polytope: HPolytope, space: MassLinearSpace) -> SuiteEntry:
    """Комбинация базиса с весами 1, 2, 3, ...: все γᵢ ненулевые для общих параметров"""
    gamma = tuple(
        sum((weight * g[i] for weight, g in enumerate(space.basis, start=1)), Fraction(0))
        for i in range(len(polytope.conormals))
    )
    h = space.functional(gamma)
    functional = integral_functional(h)
    return SuiteEntry(name, polytope, functional, _scale_gamma(gamma, functional, h))


def yk_entries() -> List[SuiteEntry]:
    entries = []
    for k, twists in YK_TWISTS.items():
        for a in twists:
            space = ml_space_Yk(a)
            for lam, h in YK_SIZES:
                kappa = tuple(Fraction(x) for x in (0,) * k + (lam, 0, h))
                try:
                    polytope = bundle_Yk(BundleSpecYk(k, a, kappa))
                except PolytopeError:
                    continue
                entries += _space_entries(polytope.name, polytope, space)
                # γ₁ = 1, γ₂ = −1 нарушает Σaᵢγᵢ = 0 при a₁ ≠ a₂
                entries.append(SuiteEntry(polytope.name, polytope, tuple(polytope.conormals[0][i] - polytope.conormals[1][i] for i in range(k + 1))))
    return entries


def bundle_121_entries() -> List[SuiteEntry]:
    entries = []
    for a, d in BUNDLE_121_PARAMETERS:
        height = 3 * sum(abs(x) for x in a) + 5
        kappa = tuple(Fraction(x) for x in (1, 0, 0, 0, 3, 0, height))
        try:
            polytope = bundle_121(BundleSpec121(a, d, kappa))
        except PolytopeError:
            continue
        space = ml_space_121(a, d)
        entries += _space_entries(polytope.name, polytope, space)
        if a[0] == 0 and d == 0:
            entries.append(_generic_entry(polytope.name, polytope, space))
    return entries


def d2_entries() -> List[SuiteEntry]:
    entries = []
    base = simplex(2)
    for twist in D2_TWISTS:
        spec = BundleSpecD2Polygon(base, ((0, 0), (0, 0), twist), tuple(Fraction(x) for x in (0, 0, 1, 0, 0, 4)))
        try:
            polytope = bundle_D2_polygon(spec)
        except PolytopeError:
            continue
        entries += _space_entries(polytope.name, polytope, ml_space_D2_polygon(spec))
    return entries


def expansion_entries() -> List[SuiteEntry]:
    entries = []
    cores = (simplex(2), trapezoid(), polygon_blowup_chain(5))
    for core in cores:
        for facet in range(core.n_facets):
            for fold in (1, 2):
                if core.dim + fold > 4:
                    continue
                polytope = expansion(core, facet, fold)
                for members in equivalence_classes(polytope).nontrivial():
                    i, j = members[0], members[-1]
                    h = tuple(x - y for x, y in zip(polytope.conormals[i], polytope.conormals[j]))
                    gamma = tuple(Fraction(1 if m == i else -1 if m == j else 0) for m in range(polytope.n_facets))
                    entries.append(SuiteEntry(polytope.name, polytope, h, gamma))
    return entries


def blowup_entries(sources: Sequence[SuiteEntry], per_entry: int = 2) -> List[SuiteEntry]:
    """Раздутия вершин, лежащих на всех асимметричных фасетах"""
    entries = []
    for entry in sources:
        if entry.gamma is None:
            continue
        made = 0
        for vertex in entry.polytope.vertices:
            if made >= per_entry:
                break
            if not vertex_blowup_preserves(entry.polytope, entry.gamma, vertex.basis):
                continue
            try:
                blown = blowup(entry.polytope, vertex.basis)
            except PolytopeError:
                continue
            gamma = tuple(entry.gamma) + (Fraction(0),)
            entries.append(SuiteEntry(f"{entry.name}+E", blown, entry.functional, gamma))
            made += 1
    return entries


@lru_cache(maxsize=None)
def example_suite() -> Tuple[SuiteEntry, ...]:
    """Все пары набора в детерминированном порядке"""
    base = yk_entries() + bundle_121_entries() + d2_entries() + expansion_entries()
    low_dim = [e for e in base if e.polytope.dim <= 3]
    entries = base + blowup_entries(low_dim)
    logger.info("Example suite generated", pairs=len(entries))
    return tuple(entries)

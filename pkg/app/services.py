"""Сценарии команд: общие для CLI, API и пакетных проверок"""
from typing import Callable, Dict, List, Optional, Sequence

import structlog

from app.config import get_settings
from app.schemas import (
    BarycenterDocument,
    BlowdownDocument,
    ClassificationDocument,
    MassLinearSpaceDocument,
    PolytopeDocument,
    ReportDocument,
    TraceDocument,
)
from polytopes.constructions import (
    BundleSpec121,
    BundleSpecD2Polygon,
    BundleSpecYk,
    MassLinearSpace,
    blowdown,
    blowup,
    box,
    bundle_121,
    bundle_D2_polygon,
    bundle_Yk,
    double_expansion,
    expansion,
    face_index_set,
    minimal_family_a3,
    minimal_family_b,
    ml_space_121,
    ml_space_D2_polygon,
    ml_space_Yk,
    polygon_blowup_chain,
    product,
    segment,
    simplex,
    trapezoid,
)
from polytopes.errors import ValidationError
from polytopes.masslinear import (
    equivalence_classes,
    flat_facets,
    fully_mass_linear_test,
    generating_vector,
    is_inessential,
    mass_linear_test,
)
from polytopes.polytope_core import HPolytope, require_smooth
from polytopes.recognize_classify import ClassificationResult, classify4d
from polytopes.rational_kernel import format_rational, to_rational

logger = structlog.get_logger()

FAMILIES = (
    "simplex",
    "product",
    "bundle-yk",
    "bundle-121",
    "bundle-d2-polygon",
    "expansion",
    "double-expansion",
    "minimal-a3",
    "minimal-b",
    "trapezoid",
    "chain",
)

MLSPACE_FAMILIES = ("bundle-yk", "bundle-121", "bundle-d2-polygon")


def _rationals(values) -> List[str]:
    return [format_rational(v) for v in values]


def _labels(polytope: HPolytope, indices) -> List[str]:
    return [polytope.labels[i] for i in sorted(indices)]


# ---------- разбор параметров ----------


def _require(params: Dict[str, str], key: str) -> str:
    if key not in params:
        raise ValidationError("Missing family parameter", {"parameter": key})
    return params[key]


def _int(params: Dict[str, str], key: str, default: Optional[int] = None) -> int:
    raw = params.get(key)
    if raw is None:
        if default is None:
            raise ValidationError("Missing family parameter", {"parameter": key})
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValidationError("Parameter must be an integer", {"parameter": key, "value": raw})


def _int_list(raw: str, key: str) -> List[int]:
    try:
        return [int(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise ValidationError("Parameter must be a list of integers", {"parameter": key, "value": raw})


def _rational_list(raw: str) -> List:
    return [to_rational(x.strip()) for x in raw.split(",") if x.strip()]


def _kappa(params: Dict[str, str]) -> Optional[List]:
    raw = params.get("kappa", params.get("κ"))
    return _rational_list(raw) if raw is not None else None


def _twists(raw: str) -> tuple:
    """b1:b2;b1:b2;..."""
    result = []
    for chunk in raw.split(";"):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ValidationError("Twist must be written as b1:b2", {"value": chunk})
        try:
            result.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValidationError("Twist entries must be integers", {"value": chunk})
    return tuple(result)


def parse_core(text: str) -> HPolytope:
    """
    Короткая запись многогранника: simplex:n, box:n, chain:k, segment, trapezoid

    Raises:
        ValidationError: неизвестная запись
    """
    name, _, arg = text.partition(":")
    try:
        if name == "simplex":
            return simplex(int(arg or 2))
        if name == "box":
            return box(int(arg or 2))
        if name == "chain":
            return polygon_blowup_chain(int(arg or 5))
    except ValueError:
        raise ValidationError("Core size must be an integer", {"core": text})
    if name == "segment":
        return segment()
    if name == "trapezoid":
        return trapezoid()
    raise ValidationError("Unknown core polytope", {"core": text})


def _facet(polytope: HPolytope, raw: str) -> int:
    item = int(raw) if raw.lstrip("-").isdigit() else raw
    (index,) = face_index_set(polytope, [item])
    return index


def _construct_simplex(params):
    return simplex(_int(params, "n", 2), to_rational(params.get("size", "1")))


def _construct_product(params):
    factors = [parse_core(x.strip()) for x in _require(params, "factors").split(",") if x.strip()]
    if len(factors) < 2:
        raise ValidationError("Product needs at least two factors", {"factors": len(factors)})
    result = factors[0]
    for factor in factors[1:]:
        result = product(result, factor)
    return result


def _construct_yk(params):
    a = _int_list(_require(params, "a"), "a")
    k = _int(params, "k", len(a))
    kappa = _kappa(params)
    if kappa is None:
        raise ValidationError("Missing family parameter", {"parameter": "kappa"})
    return bundle_Yk(BundleSpecYk(k, tuple(a), tuple(kappa)))


def _construct_121(params):
    kappa = _kappa(params)
    if kappa is None:
        raise ValidationError("Missing family parameter", {"parameter": "kappa"})
    return bundle_121(BundleSpec121(tuple(_int_list(_require(params, "a"), "a")), _int(params, "d"), tuple(kappa)))


def _d2_spec(params) -> BundleSpecD2Polygon:
    base = parse_core(params.get("base", "simplex:2"))
    kappa = _kappa(params)
    return BundleSpecD2Polygon(base, _twists(_require(params, "twists")), tuple(kappa) if kappa else None)


def _construct_d2(params):
    return bundle_D2_polygon(_d2_spec(params))


def _construct_expansion(params):
    core = parse_core(_require(params, "core"))
    return expansion(core, _facet(core, _require(params, "facet")), _int(params, "fold", 1))


def _construct_double_expansion(params):
    core = parse_core(_require(params, "core"))
    return double_expansion(core, _facet(core, _require(params, "first")), _facet(core, _require(params, "second")))


def _construct_trapezoid(params):
    kappa = _kappa(params)
    return trapezoid(kappa) if kappa else trapezoid()


CONSTRUCTORS: Dict[str, Callable[[Dict[str, str]], HPolytope]] = {
    "simplex": _construct_simplex,
    "product": _construct_product,
    "bundle-yk": _construct_yk,
    "bundle-121": _construct_121,
    "bundle-d2-polygon": _construct_d2,
    "expansion": _construct_expansion,
    "double-expansion": _construct_double_expansion,
    "minimal-a3": lambda params: minimal_family_a3(_int(params, "N")),
    "minimal-b": lambda params: minimal_family_b(_int(params, "N")),
    "trapezoid": _construct_trapezoid,
    "chain": lambda params: polygon_blowup_chain(_int(params, "k")),
}


def parse_parameters(items: Sequence[str]) -> Dict[str, str]:
    """Список key=value в словарь"""
    params: Dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValidationError("Parameter must be written as key=value", {"value": item})
        params[key.strip()] = value.strip()
    return params


def construct(family: str, params: Dict[str, str]) -> HPolytope:
    """
    Построить многогранник семейства

    Raises:
        ValidationError: неизвестное семейство или параметры
        ChamberError: support вне камеры семейства
    """
    if family not in CONSTRUCTORS:
        raise ValidationError("Unknown family", {"family": family, "families": list(FAMILIES)})
    polytope = CONSTRUCTORS[family](params)
    logger.info("Polytope constructed", family=family, facets=polytope.n_facets, dim=polytope.dim)
    return polytope


# ---------- команды ----------


def _require_size(polytope: HPolytope) -> None:
    limit = get_settings().MAX_FACETS
    if polytope.n_facets > limit:
        raise ValidationError("Too many facets", {"facets": polytope.n_facets, "max_facets": limit})


def classification_document(result: ClassificationResult) -> ClassificationDocument:
    terminal = result.terminal
    return ClassificationDocument(
        type=result.type_tag,
        alternatives=list(result.alternatives),
        reason=result.reason,
        trace=[
            TraceDocument(
                facet=entry.facet,
                label=entry.label,
                face=list(entry.face_labels),
                face_indices=list(entry.face),
                eps=format_rational(entry.eps),
                tag=entry.tag,
            )
            for entry in result.trace
        ],
        terminal=PolytopeDocument.from_polytope(terminal),
        terminal_gamma=_rationals(result.terminal_report.gamma),
        terminal_essential=result.terminal_essential,
    )


def check(polytope: HPolytope, functional: Sequence[int], classify: bool = False, seed: Optional[int] = None) -> ReportDocument:
    """
    Полная проверка пары (Δ, H)

    Гладкость, массовая линейность, разбиение фасет, классы эквивалентности,
    несущественность, барицентры остовов; при classify и n = 4 - классификация.
    """
    _require_size(polytope)
    require_smooth(polytope)
    functional = list(functional)
    report = mass_linear_test(polytope, functional, seed=seed)
    classes = equivalence_classes(polytope)
    flat = flat_facets(polytope)
    document = ReportDocument(
        polytope=PolytopeDocument.from_polytope(polytope),
        functional=functional,
        smooth=True,
        mass_linear=report.verdict,
        symmetric=_labels(polytope, report.symmetric),
        asymmetric=_labels(polytope, report.asymmetric),
        pervasive_asymmetric=[polytope.labels[i] for i, p in enumerate(report.pervasive_asymmetric) if p],
        flat_asymmetric=_labels(polytope, report.asymmetric & flat),
        equivalence_classes=[_labels(polytope, c) for c in classes.classes],
    )
    full = fully_mass_linear_test(polytope, functional)
    document.barycenters = [_rationals(b) for b in full.barycenters]
    document.barycenter_values = _rationals(full.values)
    document.fully_mass_linear = full.verdict
    if report.verdict:
        document.gamma = _rationals(report.gamma)
        witness = is_inessential(polytope, functional, classes)
        document.inessential = witness is not None
        document.beta = _rationals(witness.beta) if witness is not None else None
        xi = generating_vector(polytope, functional, report.gamma)
        document.generating_vector = _rationals(xi) if xi is not None else None
        if classify and polytope.dim == 4:
            document.classification = classification_document(classify4d(polytope, functional))
    logger.info(
        "Check finished",
        name=polytope.name,
        mass_linear=report.verdict,
        inessential=document.inessential,
    )
    return document


def classify(polytope: HPolytope, functional: Sequence[int]) -> ClassificationDocument:
    _require_size(polytope)
    return classification_document(classify4d(polytope, list(functional)))


def barycenters(polytope: HPolytope, functional: Sequence[int]) -> BarycenterDocument:
    full = fully_mass_linear_test(polytope, list(functional))
    return BarycenterDocument(
        name=polytope.name,
        functional=list(functional),
        barycenters=[_rationals(b) for b in full.barycenters],
        values=_rationals(full.values),
        fully_mass_linear=full.verdict,
    )


def blowup_face(polytope: HPolytope, face: Sequence, eps: Optional[str] = None) -> PolytopeDocument:
    members = face_index_set(polytope, list(face))
    return PolytopeDocument.from_polytope(blowup(polytope, members, to_rational(eps) if eps is not None else None))


def blowdown_facet(polytope: HPolytope, facet) -> BlowdownDocument:
    (index,) = face_index_set(polytope, [facet])
    outcome = blowdown(polytope, index)
    if not outcome.success:
        return BlowdownDocument(success=False, facet=polytope.labels[index], violation=outcome.violation)
    reduced = outcome.polytope
    return BlowdownDocument(
        success=True,
        facet=polytope.labels[index],
        polytope=PolytopeDocument.from_polytope(reduced),
        face=_labels(reduced, outcome.index_set),
        eps=format_rational(outcome.eps),
        candidates=[_labels(reduced, c.index_set) for c in outcome.candidates],
    )


def _space_document(space: MassLinearSpace, params: Dict[str, str]) -> MassLinearSpaceDocument:
    return MassLinearSpaceDocument(
        family=space.family,
        parameters=dict(params),
        basis=[_rationals(g) for g in space.basis],
        functionals=[_rationals(h) for h in space.functionals],
        inessential=[_rationals(g) for g in space.inessential],
        details=space.details,
    )


def mlspace(family: str, params: Dict[str, str]) -> MassLinearSpaceDocument:
    """
    Raises:
        ValidationError: семейство без формулы пространства
    """
    if family == "bundle-yk":
        space = ml_space_Yk(tuple(_int_list(_require(params, "a"), "a")))
    elif family == "bundle-121":
        space = ml_space_121(tuple(_int_list(_require(params, "a"), "a")), _int(params, "d"))
    elif family == "bundle-d2-polygon":
        space = ml_space_D2_polygon(_d2_spec(params))
    else:
        raise ValidationError("No mass linear space formula for family", {"family": family, "families": list(MLSPACE_FAMILIES)})
    return _space_document(space, params)

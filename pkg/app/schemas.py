"""Pydantic схемы документов и API"""
import json
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field

from polytopes.errors import ValidationError
from polytopes.polytope_core import HPolytope
from polytopes.rational_kernel import format_rational, to_rational


class FacetDocument(BaseModel):
    """Фасета ⟨normal, x⟩ ≤ kappa"""
    normal: List[int] = Field(..., description="Примитивная целочисленная внешняя конормаль")
    kappa: str = Field(..., description="Опорное число в виде p/q")
    label: Optional[str] = Field(None, description="Метка фасеты")


class PolytopeDocument(BaseModel):
    """Многогранник в полупространственной форме"""
    name: Optional[str] = Field(None, description="Имя многогранника")
    dim: int = Field(..., description="Размерность")
    facets: List[FacetDocument] = Field(..., description="Фасеты в порядке индексов")
    functional: Optional[List[int]] = Field(None, description="Функционал H для пакетной проверки")

    def to_polytope(self) -> HPolytope:
        """
        Raises:
            ValidationError: несовпадение размерности или неверные числа
        """
        for i, facet in enumerate(self.facets):
            if len(facet.normal) != self.dim:
                raise ValidationError(
                    "Conormal length does not match dim",
                    {"facet": i, "dim": self.dim, "length": len(facet.normal)},
                )
        labels = None
        if any(f.label for f in self.facets):
            labels = [f.label or f"F{i + 1}" for i, f in enumerate(self.facets)]
        return HPolytope(
            [f.normal for f in self.facets],
            [to_rational(f.kappa) for f in self.facets],
            name=self.name,
            labels=labels,
        )

    @classmethod
    def from_polytope(cls, polytope: HPolytope, functional: Optional[List[int]] = None) -> "PolytopeDocument":
        return cls(
            name=polytope.name,
            dim=polytope.dim,
            facets=[
                FacetDocument(normal=list(eta), kappa=format_rational(k), label=label)
                for eta, k, label in zip(polytope.conormals, polytope.support, polytope.labels)
            ],
            functional=functional,
        )


class TraceDocument(BaseModel):
    """Шаг трассы классификации в порядке раздутий"""
    facet: int = Field(..., description="Позиция исключительного дивизора")
    label: str
    face: List[str] = Field(..., description="Метки фасет раздуваемой грани")
    face_indices: List[int]
    eps: str
    tag: str = Field(..., description="symmetric_2face, edge_type_Fij_G, vertex или other")


class ClassificationDocument(BaseModel):
    """Результат классификации пары (Δ, H)"""
    type: str = Field(..., description="a1, a2, a3, b, inessential, zero или unclassified")
    alternatives: List[str] = Field(default_factory=list)
    reason: Optional[str] = None
    trace: List[TraceDocument] = Field(default_factory=list)
    terminal: PolytopeDocument
    terminal_gamma: List[str]
    terminal_essential: bool


class ReportDocument(BaseModel):
    """Отчет проверки массовой линейности"""
    polytope: PolytopeDocument
    functional: List[int]
    smooth: bool
    mass_linear: bool
    gamma: Optional[List[str]] = None
    symmetric: List[str] = Field(default_factory=list)
    asymmetric: List[str] = Field(default_factory=list)
    pervasive_asymmetric: List[str] = Field(default_factory=list)
    flat_asymmetric: List[str] = Field(default_factory=list)
    equivalence_classes: List[List[str]] = Field(default_factory=list)
    inessential: Optional[bool] = None
    beta: Optional[List[str]] = None
    generating_vector: Optional[List[str]] = None
    barycenter_values: List[str] = Field(default_factory=list)
    barycenters: List[List[str]] = Field(default_factory=list)
    fully_mass_linear: Optional[bool] = None
    classification: Optional[ClassificationDocument] = None


class BarycenterDocument(BaseModel):
    """Барицентры остовов B_0..B_n и значения ⟨H, B_k⟩"""
    name: Optional[str] = None
    functional: List[int]
    barycenters: List[List[str]]
    values: List[str]
    fully_mass_linear: bool


class MassLinearSpaceDocument(BaseModel):
    """Базис массово линейных функций семейства"""
    family: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    basis: List[List[str]] = Field(..., description="Векторы γ с H = Σγᵢηᵢ")
    functionals: List[List[str]]
    inessential: List[List[str]]
    details: Dict[str, Any] = Field(default_factory=dict)


class BlowdownDocument(BaseModel):
    """Итог стягивания фасеты"""
    success: bool
    facet: str
    polytope: Optional[PolytopeDocument] = None
    face: Optional[List[str]] = None
    eps: Optional[str] = None
    candidates: List[List[str]] = Field(default_factory=list)
    violation: Optional[str] = None


class ErrorDocument(BaseModel):
    """Машиночитаемая ошибка"""
    error: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)


class HealthResponse(BaseModel):
    """Ответ health check"""
    status: str
    timestamp: str
    service: str


class FunctionalRequest(BaseModel):
    """Многогранник и функционал H"""
    polytope: PolytopeDocument
    functional: List[int] = Field(..., description="H ∈ ℤⁿ")
    classify: bool = Field(False, description="Добавить классификацию (только n = 4)")


class BlowupRequest(BaseModel):
    polytope: PolytopeDocument
    face: List[Union[int, str]] = Field(..., description="Номера или метки фасет грани")
    eps: Optional[str] = Field(None, description="Размер раздутия p/q")


class BlowdownRequest(BaseModel):
    polytope: PolytopeDocument
    facet: Union[int, str] = Field(..., description="Номер или метка фасеты")


class ConstructRequest(BaseModel):
    parameters: Dict[str, str] = Field(default_factory=dict, description="Параметры семейства key=value")


def dump_document(document: BaseModel) -> str:
    """Стабильная сериализация: порядок полей задан моделью"""
    return json.dumps(document.model_dump(mode="json"), indent=2, ensure_ascii=False)

"""Исключения доменного пакета"""
from typing import Any, Dict, Optional


class PolytopeError(Exception):
    """Базовая ошибка: код для машинного вывода плюс детали"""

    code = "polytope_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, "details": self.details}


class ValidationError(PolytopeError):
    code = "validation_error"


class UnboundedPolytopeError(PolytopeError):
    code = "unbounded"


class EmptyPolytopeError(PolytopeError):
    code = "empty"


class RedundantHalfspaceError(PolytopeError):
    code = "redundant_halfspace"


class NonSimpleVertexError(PolytopeError):
    code = "non_simple_vertex"


class NonSmoothError(PolytopeError):
    code = "non_smooth"


class ChamberError(PolytopeError):
    code = "outside_chamber"


class FaceError(PolytopeError):
    code = "face_error"


class BlowupError(PolytopeError):
    code = "blowup_error"


class NotMassLinearError(PolytopeError):
    code = "not_mass_linear"


class DimensionError(PolytopeError):
    code = "dimension_error"


class InconsistencyError(PolytopeError):
    """Внутренняя перекрестная проверка не прошла"""

    code = "inconsistency"

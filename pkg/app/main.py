"""Главное приложение FastAPI"""
from datetime import datetime

import structlog
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app import services
from app.config import get_settings
from app.logger import configure_logging
from app.schemas import (
    BarycenterDocument,
    BlowdownDocument,
    BlowdownRequest,
    BlowupRequest,
    ClassificationDocument,
    ConstructRequest,
    FunctionalRequest,
    HealthResponse,
    MassLinearSpaceDocument,
    PolytopeDocument,
    ReportDocument,
)
from polytopes.errors import PolytopeError

configure_logging()

logger = structlog.get_logger()
settings = get_settings()

app = FastAPI(
    title="Mass Linear Toolkit API",
    description="API для проверки массовой линейности функций на гладких многогранниках",
    version="1.0.0",
)


@app.on_event("startup")
async def startup_event():
    """Инициализация при старте приложения"""
    logger.info("Starting Mass Linear Toolkit API", env=settings.ENV)


@app.on_event("shutdown")
async def shutdown_event():
    """Очистка при остановке приложения"""
    logger.info("Shutting down Mass Linear Toolkit API")


@app.exception_handler(PolytopeError)
async def polytope_error_handler(request: Request, exc: PolytopeError):
    """Доменные ошибки -> 422 с машиночитаемым телом"""
    logger.warning("Request rejected", path=request.url.path, error=exc.message, error_type=exc.code)
    return JSONResponse(status_code=422, content=exc.to_dict())


@app.get("/health", response_model=HealthResponse)
async def health_check():
    """Health check endpoint"""
    return HealthResponse(
        status="healthy",
        timestamp=datetime.utcnow().isoformat(),
        service="masslinear-toolkit-api",
    )


@app.post("/check", response_model=ReportDocument)
def check(request: FunctionalRequest):
    """
    Проверить массовую линейность H на многограннике

    Возвращает γ, разбиение фасет, классы эквивалентности, несущественность и
    барицентры остовов; с classify=true и n = 4 добавляет классификацию.
    """
    polytope = request.polytope.to_polytope()
    return services.check(polytope, request.functional, classify=request.classify)


@app.post("/classify", response_model=ClassificationDocument)
def classify(request: FunctionalRequest):
    """Классифицировать массово линейную пару в размерности 4"""
    return services.classify(request.polytope.to_polytope(), request.functional)


@app.post("/barycenters", response_model=BarycenterDocument)
def barycenters(request: FunctionalRequest):
    return services.barycenters(request.polytope.to_polytope(), request.functional)


@app.post("/construct/{family}", response_model=PolytopeDocument)
def construct(family: str, request: ConstructRequest):
    """Построить многогранник семейства по параметрам key=value"""
    return PolytopeDocument.from_polytope(services.construct(family, request.parameters))


@app.post("/blowup", response_model=PolytopeDocument)
def blowup(request: BlowupRequest):
    return services.blowup_face(request.polytope.to_polytope(), request.face, request.eps)


@app.post("/blowdown", response_model=BlowdownDocument)
def blowdown(request: BlowdownRequest):
    return services.blowdown_facet(request.polytope.to_polytope(), request.facet)


@app.post("/mlspace/{family}", response_model=MassLinearSpaceDocument)
def mlspace(family: str, request: ConstructRequest):
    """Базис массово линейных и несущественных функций семейства"""
    return services.mlspace(family, request.parameters)


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host=settings.API_HOST, port=settings.API_PORT)

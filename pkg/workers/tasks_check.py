"""Пакетная проверка документов многогранников"""
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional

import pydantic
import structlog
from dotenv import load_dotenv

from app.schemas import ErrorDocument, PolytopeDocument
from app.services import check
from polytopes.errors import PolytopeError

load_dotenv()

logger = structlog.get_logger()

POLYTOPE_SUFFIX = ".polytope.json"
REPORT_SUFFIX = ".report.json"


def report_path(path: Path) -> Path:
    """foo.polytope.json -> foo.report.json"""
    return path.with_name(path.name[: -len(POLYTOPE_SUFFIX)] + REPORT_SUFFIX)


def check_document(path: str, seed: Optional[int] = None, classify: bool = False) -> Dict[str, Any]:
    """
    Проверить один документ *.polytope.json

    Функционал берется из поля functional документа; без него проверяется H = 0.

    Returns:
        Отчет или документ ошибки в виде dict
    """
    try:
        document = PolytopeDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))
        polytope = document.to_polytope()
        functional = document.functional or [0] * polytope.dim
        report = check(polytope, functional, classify=classify, seed=seed)
        logger.info("Document checked", path=path, mass_linear=report.mass_linear)
        return report.model_dump(mode="json")
    except PolytopeError as e:
        logger.error("Document check failed", path=path, error=e.message, error_type=e.code)
        return ErrorDocument(**e.to_dict()).model_dump(mode="json")
    except pydantic.ValidationError as e:
        logger.error("Malformed document", path=path, error=str(e), error_type=type(e).__name__)
        return ErrorDocument(error="validation_error", message="Malformed polytope document", details={"path": path}).model_dump(mode="json")


def run_batch(
    directory: str,
    jobs: int = 1,
    seed: Optional[int] = None,
    classify: bool = False,
    write: bool = False,
) -> List[Dict[str, Any]]:
    """
    Проверить все *.polytope.json каталога

    Args:
        directory: каталог с документами
        jobs: число процессов; 1 - без пула
        write: сохранить отчеты рядом как *.report.json

    Returns:
        Отчеты в порядке имен файлов
    """
    paths = sorted(Path(directory).glob(f"*{POLYTOPE_SUFFIX}"))
    logger.info("Batch started", directory=directory, documents=len(paths), jobs=jobs)
    names = [str(p) for p in paths]
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(check_document, names, [seed] * len(names), [classify] * len(names)))
    else:
        results = [check_document(name, seed, classify) for name in names]
    if write:
        for path, result in zip(paths, results):
            report_path(path).write_text(json.dumps(result, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    failed = sum(1 for r in results if "error" in r)
    logger.info("Batch finished", directory=directory, documents=len(paths), failed=failed)
    return results

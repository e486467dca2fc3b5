"""Командная строка: python -m app.cli <команда> ..."""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import pydantic
import structlog
from pydantic import BaseModel

from app import services
from app.config import get_settings
from app.logger import configure_logging
from app.schemas import ErrorDocument, PolytopeDocument, dump_document
from polytopes.errors import PolytopeError, ValidationError
from polytopes.polytope_core import HPolytope
from workers.tasks_check import run_batch

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Ошибки разбора аргументов завершаются кодом 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_polytope(path: str) -> HPolytope:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    return PolytopeDocument.model_validate_json(text).to_polytope()


def _functional(raw: Optional[str], polytope: HPolytope) -> List[int]:
    if raw is None:
        raise ValidationError("Functional is required", {"dim": polytope.dim})
    try:
        return [int(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise ValidationError("Functional must be a list of integers", {"value": raw})


def _render_text(payload, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines: List[str] = []
    if isinstance(payload, dict):
        for key, value in payload.items():
            if value is None or value == [] or value == {}:
                continue
            if isinstance(value, (dict, list)) and any(isinstance(v, (dict, list)) for v in (value.values() if isinstance(value, dict) else value)):
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(value, indent + 1))
            elif isinstance(value, list):
                lines.append(f"{pad}{key}: {', '.join(str(v) for v in value)}")
            elif isinstance(value, dict):
                lines.append(f"{pad}{key}: " + ", ".join(f"{k}={v}" for k, v in value.items()))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                lines.extend(_render_text(item, indent + 1))
            elif isinstance(item, list):
                lines.append(f"{pad}- " + ", ".join(str(v) for v in item))
            else:
                lines.append(f"{pad}- {item}")
    return lines


def _emit(document, fmt: str) -> None:
    if fmt == "text":
        payload = document.model_dump(mode="json") if isinstance(document, BaseModel) else document
        print("\n".join(_render_text(payload)))
    elif isinstance(document, BaseModel):
        print(dump_document(document))
    else:
        print(json.dumps(document, indent=2, ensure_ascii=False))


def _strip_trace(document, keep: bool):
    if not keep and document is not None:
        document.trace = []
    return document


def cmd_check(args) -> BaseModel:
    polytope = _read_polytope(args.polytope)
    report = services.check(polytope, _functional(args.functional, polytope), classify=args.classify, seed=args.seed)
    _strip_trace(report.classification, args.trace)
    return report


def cmd_classify(args) -> BaseModel:
    polytope = _read_polytope(args.polytope)
    result = services.classify(polytope, _functional(args.functional, polytope))
    return _strip_trace(result, args.trace)


def cmd_construct(args) -> BaseModel:
    params = services.parse_parameters(args.parameters)
    return PolytopeDocument.from_polytope(services.construct(args.family, params))


def cmd_blowup(args) -> BaseModel:
    polytope = _read_polytope(args.polytope)
    face = [int(x) if x.isdigit() else x for x in args.face.split(",") if x]
    return services.blowup_face(polytope, face, args.eps)


def cmd_blowdown(args) -> BaseModel:
    polytope = _read_polytope(args.polytope)
    facet = int(args.facet) if args.facet.isdigit() else args.facet
    return services.blowdown_facet(polytope, facet)


def cmd_barycenters(args) -> BaseModel:
    polytope = _read_polytope(args.polytope)
    return services.barycenters(polytope, _functional(args.functional, polytope))


def cmd_mlspace(args) -> BaseModel:
    return services.mlspace(args.family, services.parse_parameters(args.parameters))


def cmd_batch(args):
    return run_batch(args.directory, jobs=args.jobs, seed=args.seed, classify=args.classify, write=args.write)


def build_parser() -> ArgumentParser:
    settings = get_settings()
    parser = ArgumentParser(prog="masslinear", description="Mass linear functions on smooth polytopes")
    parser.add_argument("--format", choices=("json", "text"), default=settings.DEFAULT_FORMAT)
    parser.add_argument("--seed", type=int, default=settings.SEED, help="seed of the random pre-filter points")
    parser.add_argument("--jobs", type=int, default=settings.JOBS)
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    check = sub.add_parser("check", help="decide mass linearity and report facet structure")
    check.add_argument("polytope", help="*.polytope.json or - for stdin")
    check.add_argument("-H", "--functional", help="comma separated integers, e.g. --functional=0,2,2,0")
    check.add_argument("--classify", action="store_true", help="append classification in dimension four")
    check.add_argument("--trace", action="store_true")
    check.set_defaults(handler=cmd_check)

    classify = sub.add_parser("classify", help="classify a mass linear pair in dimension four")
    classify.add_argument("polytope")
    classify.add_argument("-H", "--functional")
    classify.add_argument("--trace", action="store_true")
    classify.set_defaults(handler=cmd_classify)

    construct = sub.add_parser("construct", help="build a polytope of a family")
    construct.add_argument("family", choices=services.FAMILIES)
    construct.add_argument("parameters", nargs="*", help="key=value, e.g. a=1,1,0 kappa=0,0,0,1,0,2")
    construct.set_defaults(handler=cmd_construct)

    blow = sub.add_parser("blowup", help="blow up a face")
    blow.add_argument("polytope")
    blow.add_argument("--face", required=True, help="facet labels or indices, e.g. F2,F4,G1")
    blow.add_argument("--eps", help="size p/q")
    blow.set_defaults(handler=cmd_blowup)

    down = sub.add_parser("blowdown", help="blow down a facet")
    down.add_argument("polytope")
    down.add_argument("--facet", required=True)
    down.set_defaults(handler=cmd_blowdown)

    bary = sub.add_parser("barycenters", help="skeleton barycenters and <H, B_k>")
    bary.add_argument("polytope")
    bary.add_argument("-H", "--functional")
    bary.set_defaults(handler=cmd_barycenters)

    space = sub.add_parser("mlspace", help="basis of mass linear functions of a bundle family")
    space.add_argument("family", choices=services.MLSPACE_FAMILIES)
    space.add_argument("parameters", nargs="*")
    space.set_defaults(handler=cmd_mlspace)

    batch = sub.add_parser("batch", help="check every *.polytope.json in a directory")
    batch.add_argument("directory")
    batch.add_argument("--classify", action="store_true")
    batch.add_argument("--write", action="store_true", help="write *.report.json next to the inputs")
    batch.set_defaults(handler=cmd_batch)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(level=args.log_level)
    try:
        document = args.handler(args)
    except UsageError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PolytopeError as e:
        logger.error("Command failed", command=args.command, error=e.message, error_type=e.code)
        _emit(ErrorDocument(**e.to_dict()), args.format)
        return EXIT_DOMAIN
    except pydantic.ValidationError as e:
        logger.error("Malformed document", command=args.command, error=str(e), error_type=type(e).__name__)
        _emit(
            ErrorDocument(error="validation_error", message="Malformed document", details={"errors": [{"loc": [str(x) for x in err["loc"]], "msg": err["msg"]} for err in e.errors()]}),
            args.format,
        )
        return EXIT_DOMAIN
    _emit(document, args.format)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

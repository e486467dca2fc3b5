#!/usr/bin/env python3
"""Скрипт записи набора примеров в каталог документов *.polytope.json"""
import argparse
import os
import sys

# Добавляем корневую директорию в PYTHONPATH
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import structlog

from app.logger import configure_logging
from app.schemas import PolytopeDocument, dump_document
from polytopes.suite import example_suite

logger = structlog.get_logger()


def main() -> int:
    parser = argparse.ArgumentParser(description="Write the example suite as polytope documents")
    parser.add_argument("directory", help="output directory")
    parser.add_argument("--limit", type=int, default=None)
    args = parser.parse_args()
    configure_logging()

    os.makedirs(args.directory, exist_ok=True)
    entries = example_suite()
    if args.limit is not None:
        entries = entries[: args.limit]
    for number, entry in enumerate(entries):
        document = PolytopeDocument.from_polytope(entry.polytope, list(entry.functional))
        path = os.path.join(args.directory, f"{number:04d}.polytope.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write(dump_document(document) + "\n")
    logger.info("Suite written", directory=args.directory, documents=len(entries))
    print(f"✅ {len(entries)} documents written to {args.directory}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

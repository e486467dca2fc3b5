"""Настройка структурного логирования"""
import logging
import sys

import structlog

from app.config import get_settings


def configure_logging(level: str = None, fmt: str = None) -> None:
    """
    Логи в stderr: stdout CLI остается машиночитаемым

    Args:
        level: уровень (по умолчанию LOG_LEVEL)
        fmt: json или console (по умолчанию LOG_FORMAT)
    """
    settings = get_settings()
    level = (level or settings.LOG_LEVEL).upper()
    fmt = fmt or settings.LOG_FORMAT
    renderer = structlog.dev.ConsoleRenderer() if fmt == "console" else structlog.processors.JSONRenderer()
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(getattr(logging, level, logging.INFO)),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )

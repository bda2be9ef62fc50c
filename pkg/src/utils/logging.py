"""
Structured logging configuration with structlog
"""
import logging
import os
import sys
from pathlib import Path
from typing import Optional

import structlog


def setup_logging(
    log_level: Optional[str] = None,
    log_file: Optional[str] = None,
    console_output: bool = True
) -> structlog.BoundLogger:
    """
    Configure structured logging with structlog

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR); defaults to $LOG_LEVEL or INFO
        log_file: Optional path of a file that mirrors every event
        console_output: Whether to write events to stderr

    Returns:
        Configured structlog logger
    """
    log_level = (log_level or os.getenv("LOG_LEVEL", "INFO")).upper()

    handlers: list[logging.Handler] = []
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path))
    if console_output:
        handlers.append(logging.StreamHandler(sys.stderr))
    if not handlers:
        handlers.append(logging.NullHandler())

    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]

    # Events go through stdlib logging so file and console handlers share one stream
    structlog.configure(
        processors=processors + [structlog.processors.JSONRenderer()],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelName(log_level)
        ),
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )

    logging.basicConfig(
        format="%(message)s",
        level=getattr(logging, log_level),
        handlers=handlers,
        force=True,
    )

    logger = structlog.get_logger()
    logger.debug(
        "logging_configured",
        log_level=log_level,
        log_file=log_file,
        console_output=console_output
    )

    return logger


def get_logger(name: Optional[str] = None) -> structlog.BoundLogger:
    """
    Get a structlog logger instance

    Args:
        name: Optional logger name for context

    Returns:
        Configured structlog logger
    """
    # Initial values keep the proxy lazy, so module-level loggers follow later setup_logging calls
    if name:
        return structlog.get_logger(name, logger_name=name)
    return structlog.get_logger()

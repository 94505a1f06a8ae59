"""Centralized logging configuration for the toolkit."""

import logging
import os
import sys
from typing import Optional

import structlog

from eigenstrain.constants import DEFAULT_LOG_LEVEL, LOG_FORMAT


def setup_logging(
    log_level: Optional[str] = None,
    log_file: Optional[str] = None,
    json_logs: bool = False,
):
    """
    Configure process-wide logging.

    Log records go to stderr so that stdout stays reserved for result tables.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional log file path
        json_logs: Whether to output logs in JSON format
    """
    log_level = log_level or os.getenv("EIGENSTRAIN_LOG_LEVEL", DEFAULT_LOG_LEVEL)

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(stream_handler)
    root.setLevel(getattr(logging, log_level.upper()))

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(file_handler)

    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
    ]

    if json_logs:
        processors.append(structlog.processors.JSONRenderer(sort_keys=True))
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))

    structlog.configure(
        processors=processors,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


def get_logger(name: Optional[str] = None) -> structlog.BoundLogger:
    """
    Get a structured logger instance.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Configured structlog logger
    """
    return structlog.get_logger(name)


class LogContext:
    """Context manager binding key-value pairs to every log event in scope."""

    def __init__(self, **kwargs):
        """
        Initialize log context.

        Args:
            **kwargs: Key-value pairs to bind to log events
        """
        self.context = kwargs
        self.logger = None

    def __enter__(self):
        """Enter context and bind values."""
        structlog.contextvars.bind_contextvars(**self.context)
        self.logger = structlog.get_logger().bind(**self.context)
        return self.logger

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Exit context and unbind values."""
        structlog.contextvars.unbind_contextvars(*self.context.keys())

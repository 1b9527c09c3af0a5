"""
Logging configuration for qfbounds.
Provides structured logging with timestamps and context.
"""

import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union


class StructuredFormatter(logging.Formatter):
    """Custom formatter for structured log output."""

    def format(self, record):
        timestamp = (
            datetime.fromtimestamp(record.created, tz=timezone.utc)
            .isoformat()
            .replace("+00:00", "Z")
        )
        level = record.levelname
        module = record.module
        function = record.funcName
        line = record.lineno
        message = record.getMessage()

        # Add exception info if present
        exception_info = ""
        if record.exc_info:
            exception_info = f" | Exception: {self.formatException(record.exc_info)}"

        return f"[{timestamp}] {level} | {module}:{function}:{line} | {message}{exception_info}"


def setup_logging(
    level: Union[str, int] = "WARNING",
    log_dir: Optional[Union[str, Path]] = None,
    stream=None,
):
    """Configure the root logger.

    The console handler writes to stderr; stdout is reserved for JSON reports.
    File handlers are only attached when ``log_dir`` is given.
    """

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG if log_dir else level)
    root_logger.handlers.clear()

    handlers = [(logging.StreamHandler(stream or sys.stderr), level)]
    if log_dir:
        logs_dir = Path(log_dir)
        logs_dir.mkdir(parents=True, exist_ok=True)
        handlers.append((logging.FileHandler(logs_dir / "errors.log"), logging.ERROR))
        handlers.append((logging.FileHandler(logs_dir / "debug.log"), logging.DEBUG))

    formatter = StructuredFormatter()
    for handler, handler_level in handlers:
        handler.setLevel(handler_level)
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    # Suppress noisy third-party loggers
    logging.getLogger("hypothesis").setLevel(logging.WARNING)
    logging.getLogger("asyncio").setLevel(logging.WARNING)

    return root_logger

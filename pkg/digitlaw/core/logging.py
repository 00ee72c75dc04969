"""JSON logging utilities for digitlaw computations."""

from __future__ import annotations

import json
import logging
import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager
from datetime import UTC, datetime
from typing import Any

ROOT_LOGGER = "digitlaw"


class JsonFormatter(logging.Formatter):
    """Minimal JSON formatter adding an ISO timestamp and merging the event payload."""

    def format(self, record: logging.LogRecord) -> str:  # noqa: D401
        event: dict[str, object] = getattr(record, "event", {})
        payload: dict[str, object] = {
            "ts": datetime.now(tz=UTC).isoformat(timespec="milliseconds"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if event:
            payload.update(event)
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


def configure_logging(level: str = "WARNING", fmt: str = "json") -> logging.Logger:
    """Configure the package logger (stderr only) and return it."""
    level = level.upper()
    if level not in logging.getLevelNamesMapping():
        level = "WARNING"
    logger = logging.getLogger(ROOT_LOGGER)
    if logger.handlers:
        # follow a replaced sys.stderr
        for existing in logger.handlers:
            if isinstance(existing, logging.StreamHandler):
                existing.setStream(sys.stderr)
        logger.setLevel(level)
        return logger

    handler = logging.StreamHandler(sys.stderr)
    if fmt == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger


@contextmanager
def operation_log_context(operation: str, **fields: Any) -> Iterator[dict[str, Any]]:
    """Time one computation and write a single structured log entry.

    The yielded dict may be filled with result fields by the caller; they end up
    in the record next to the timing.
    """

    logger = logging.getLogger(ROOT_LOGGER)
    started = time.perf_counter()
    status = "ok"
    error_message: str | None = None
    result: dict[str, Any] = {}
    try:
        yield result
    except Exception as exc:  # noqa: BLE001 - re-raise after logging
        status = "error"
        error_message = str(exc)
        raise
    finally:
        duration_ms = int((time.perf_counter() - started) * 1000)
        event: dict[str, Any] = {
            "operation": operation,
            "duration_ms": duration_ms,
            "status": status,
        }
        if fields:
            event["params"] = fields
        if result:
            event["result"] = result
        if error_message:
            event["error"] = error_message
        logger.info("operation.execution", extra={"event": event})

from __future__ import annotations

import logging
import logging.config
import os
import sys
from contextvars import ContextVar
from typing import Any

from dotenv import load_dotenv
from uuid6 import uuid7

# Run id of the current CLI invocation
_run_id_ctx: ContextVar[str | None] = ContextVar("run_id", default=None)


class RunIdFilter(logging.Filter):
    """Injects run_id from contextvars into log records."""

    def filter(self, record: logging.LogRecord) -> bool:  # type: ignore[override]
        try:
            run_id = _run_id_ctx.get() or "-"
        except Exception:
            run_id = "-"
        setattr(record, "run_id", run_id)
        return True


def set_run_id(value: str | None) -> None:
    _run_id_ctx.set(value)


def get_run_id() -> str | None:
    return _run_id_ctx.get()


def generate_run_id() -> str:
    return uuid7().hex


def configure_logging() -> None:
    load_dotenv()
    level = os.getenv("LOG_LEVEL", "INFO").upper()

    handlers: dict[str, Any] = {
        "console": {
            "class": "logging.StreamHandler",
            "stream": sys.stderr,
            "formatter": "standard",
            "filters": ["run_id"],
        }
    }

    formatters: dict[str, Any] = {
        "standard": {
            "format": "%(asctime)s | %(levelname)s | %(name)s | rid=%(run_id)s | %(message)s",
            "datefmt": "%Y-%m-%dT%H:%M:%S%z",
        }
    }

    filters: dict[str, Any] = {
        "run_id": {
            "()": RunIdFilter,
        }
    }

    loggers: dict[str, Any] = {
        "conluio": {"level": level, "handlers": ["console"], "propagate": False},
        "conluio.core.topics": {"level": os.getenv("LOG_LEVEL_KMEANS", level).upper()},
    }

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "filters": filters,
            "formatters": formatters,
            "handlers": handlers,
            "root": {"level": "WARNING", "handlers": ["console"]},
            "loggers": loggers,
        }
    )


# Convenience logger for the CLI
logger = logging.getLogger("conluio.cli")

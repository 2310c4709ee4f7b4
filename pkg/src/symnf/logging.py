"""
structlog setup for symnf.

Logs always go to stderr; stdout belongs to CLI reports. Every event inside
a command run carries the command, field and truncation orders bound by
``bind_run``.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import MutableMapping
from fractions import Fraction
from typing import Any

import numpy as np
import structlog

from .config import settings
from .fields import GaussianRational

QUIET_LOGGERS = ("httpx", "httpcore", "asyncio")


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction | GaussianRational):
        return str(value)
    if isinstance(value, complex | np.complexfloating):
        return float(value.real) if value.imag == 0 else [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, tuple | list):
        return [_plain(v) for v in value]
    return value


def render_numbers(_: Any, __: str, event: MutableMapping[str, Any]) -> MutableMapping[str, Any]:
    """Exact, complex and numpy values as JSON-ready data."""
    for key, value in event.items():
        event[key] = _plain(value)
    return event


def bind_run(command: str, field: str, trunc: int | None, h_trunc: int | None) -> None:
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(
        command=command, field=field, trunc=trunc, h_trunc=h_trunc
    )


def _level(name: str | None) -> int:
    value = logging.getLevelName((name or settings.log_level).upper())
    return value if isinstance(value, int) else logging.INFO


def shared_processors() -> list[structlog.types.Processor]:
    """Pre-chain shared by structlog events and foreign stdlib records."""
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.UnicodeDecoder(),
        render_numbers,
    ]


def setup_logging(level: str | None = None) -> None:
    """Configure structlog for the CLI and the HTTP service."""
    pre_chain = shared_processors()
    renderer: structlog.types.Processor = (
        structlog.processors.JSONRenderer(ensure_ascii=False, sort_keys=True)
        if settings.log_json
        else structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty())
    )

    structlog.configure(
        processors=[*pre_chain, structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        structlog.stdlib.ProcessorFormatter(
            foreign_pre_chain=pre_chain,
            processors=[structlog.stdlib.ProcessorFormatter.remove_processors_meta, renderer],
        )
    )
    root = logging.getLogger()
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(_level(level))

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

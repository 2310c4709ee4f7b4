"""
Prometheus metrics for symnf — stage runs, latencies, resonance rejections, HTTP.
Includes a context manager that tracks a pipeline stage and stamps escaping errors.
"""

from __future__ import annotations

import time
from collections.abc import Iterator
from contextlib import contextmanager

import structlog
from prometheus_client import Counter, Histogram

from .errors import NormalFormError, PreconditionError, ResonanceError

logger = structlog.get_logger(__name__)

# ── Stages ──
stage_runs_total = Counter("symnf_stage_runs_total", "Pipeline stage runs", ["stage", "outcome"])
stage_duration_seconds = Histogram(
    "symnf_stage_duration_seconds", "Pipeline stage latency", ["stage"]
)

# ── Resonances ──
resonance_rejections_total = Counter(
    "symnf_resonance_rejections_total", "Inputs rejected by a non-resonance check", ["condition"]
)

# ── HTTP ──
http_requests_total = Counter(
    "symnf_http_requests_total", "HTTP requests", ["method", "path", "status"]
)
http_request_duration = Histogram(
    "symnf_http_request_duration_seconds", "HTTP request latency", ["method", "path"]
)


def _outcome(exc: BaseException) -> str:
    if isinstance(exc, ResonanceError):
        return "resonance"
    if isinstance(exc, PreconditionError):
        return "precondition"
    return "error"


@contextmanager
def track_stage(stage: str) -> Iterator[None]:
    """Time a stage, count its outcome, and attribute escaping errors to it."""
    start = time.perf_counter()
    try:
        yield
    except NormalFormError as exc:
        if exc.stage is None:
            exc.stage = stage
        stage_runs_total.labels(stage=stage, outcome=_outcome(exc)).inc()
        logger.warning("stage_failed", stage=stage, code=exc.code, error=exc.message)
        raise
    except Exception:
        stage_runs_total.labels(stage=stage, outcome="error").inc()
        raise
    else:
        stage_runs_total.labels(stage=stage, outcome="ok").inc()
    finally:
        stage_duration_seconds.labels(stage=stage).observe(time.perf_counter() - start)

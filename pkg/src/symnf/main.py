"""
symnf HTTP service — the CLI commands over FastAPI.
Granian-served; stateless, one request runs one command.
"""

from __future__ import annotations

import time
from contextlib import asynccontextmanager

import structlog
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.concurrency import run_in_threadpool
from prometheus_client import CONTENT_TYPE_LATEST, generate_latest

from . import __version__
from .commands import list_commands, names, run_command
from .config import settings
from .errors import NormalFormError, SchemaError
from .logging import setup_logging
from .metrics import http_request_duration, http_requests_total
from .models import CommandInfo, CommandsResponse, HealthResponse, RunRequest

logger = structlog.get_logger()


@asynccontextmanager
async def lifespan(app: FastAPI):
    setup_logging()
    logger.info("symnf_starting", version=__version__, field=settings.field)
    yield
    logger.info("symnf_shutdown")


app = FastAPI(
    title="symnf",
    version=__version__,
    description="Symplectic logarithms and classical / quantum Birkhoff normal forms on jets",
    lifespan=lifespan,
)


# ── Middleware ──


@app.middleware("http")
async def metrics_middleware(request: Request, call_next):
    """Track HTTP request metrics."""
    start = time.perf_counter()
    response = await call_next(request)
    duration = time.perf_counter() - start

    path = request.url.path
    # one label per command, never per payload
    if path.startswith("/v1/"):
        parts = path.split("/")
        path = "/v1/" + parts[2] if len(parts) > 2 and parts[2] in names() else "/v1/other"

    http_requests_total.labels(method=request.method, path=path, status=response.status_code).inc()
    http_request_duration.labels(method=request.method, path=path).observe(duration)
    return response


# ── Health ──


@app.get("/health", response_model=HealthResponse)
async def health():
    return HealthResponse(status="ok", version=__version__)


# ── Metrics (Prometheus scrape) ──


@app.get("/metrics")
async def metrics():
    """Prometheus scrape endpoint."""
    return Response(content=generate_latest(), media_type=CONTENT_TYPE_LATEST)


# ── Commands ──


@app.get("/v1/commands", response_model=CommandsResponse)
async def commands():
    return CommandsResponse(commands=[CommandInfo(**c) for c in list_commands()])


@app.post("/v1/{command}")
async def run(command: str, req: RunRequest):
    """Run one command; the body is the CLI input plus options."""
    if command not in names():
        raise HTTPException(404, f"unknown command: {command}")
    try:
        return await run_in_threadpool(run_command, command, req.input, req.options)
    except SchemaError as e:
        raise HTTPException(422, e.to_dict()) from e
    except NormalFormError as e:
        logger.warning("command_rejected", command=command, code=e.code, stage=e.stage)
        raise HTTPException(409, e.to_dict()) from e

"""
Command Registry — one module per pipeline stage.
Each command module exports `DESCRIPTION` and `run(payload, ctx) -> dict`.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import ModuleType
from typing import Any

import structlog

from .. import __version__
from ..config import settings
from ..errors import PreconditionError
from ..fields import Field, get_field
from ..jetcalc import HJet, Jet
from ..logging import bind_run
from ..metrics import track_stage
from ..models import ReportHeader, RunOptions

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Context:
    """Options resolved against settings for one invocation."""

    field: Field
    trunc: int | None
    h_trunc: int | None
    tol: float
    branch: str
    homotopy: str = "exponential"
    winding: int = 0

    def order(self, available: int) -> int:
        """Requested degree, which the input must resolve."""
        if self.trunc is None:
            return available
        if self.trunc > available:
            raise PreconditionError(
                "input is not resolved to the requested order", trunc=self.trunc, input=available
            )
        return self.trunc

    def jet(self, a: Jet) -> Jet:
        return a.truncate(self.order(a.trunc))

    def hjet(self, a: HJet) -> HJet:
        N = a.trunc if self.trunc is None else self.trunc
        M = a.h_trunc if self.h_trunc is None else self.h_trunc
        if N > a.trunc or M > a.h_trunc:
            raise PreconditionError(
                "input is not resolved to the requested order",
                trunc=N,
                h_trunc=M,
                input=[a.trunc, a.h_trunc],
            )
        return a.truncate(N, M)


def resolve(options: RunOptions) -> Context:
    tol = options.tol if options.tol is not None else settings.tol
    return Context(
        field=get_field(options.field or settings.field, tol),
        trunc=options.trunc if options.trunc is not None else settings.trunc,
        h_trunc=options.h_trunc if options.h_trunc is not None else settings.h_trunc,
        tol=tol,
        branch=options.branch or settings.branch,
        homotopy=options.homotopy,
        winding=options.winding,
    )


# Import command modules
from . import bnf, maplog, oplog, pipeline, qbnf, resonance, symlog  # noqa: E402

_REGISTRY: dict[str, ModuleType] = {
    "symlog": symlog,
    "resonance": resonance,
    "maplog": maplog,
    "bnf": bnf,
    "oplog": oplog,
    "qbnf": qbnf,
    "pipeline": pipeline,
}


def names() -> list[str]:
    return list(_REGISTRY)


def list_commands() -> list[dict[str, str]]:
    """List all available commands with descriptions."""
    return [{"id": name, "description": mod.DESCRIPTION} for name, mod in _REGISTRY.items()]


def run_command(command: str, payload: Any, options: RunOptions | None = None) -> dict[str, Any]:
    """Run one command and wrap its result with the report header."""
    mod = _REGISTRY.get(command)
    if mod is None:
        raise PreconditionError("unknown command", command=command)
    ctx = resolve(options or RunOptions())
    bind_run(command, ctx.field.name, ctx.trunc, ctx.h_trunc)
    with track_stage(command):
        result = mod.run(payload, ctx)
    header = ReportHeader(
        version=__version__,
        command=command,
        field=ctx.field.name,
        trunc=result.pop("trunc"),
        h_trunc=result.pop("h_trunc", 0),
        tol=ctx.tol,
        branch=ctx.branch,
    )
    logger.info("command_done", trunc=header.trunc, h_trunc=header.h_trunc)
    return {"header": header.model_dump(), "result": result}

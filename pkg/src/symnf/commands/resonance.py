"""Resonance scan of a list of exponents."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from ..codec import decode_mus, parse
from ..homology import resonance_scan
from ..models import ResonanceInput

if TYPE_CHECKING:
    from . import Context

DESCRIPTION = "exponents μ + degree bound → resonance report per condition"


def run(payload: Any, ctx: Context) -> dict[str, Any]:
    model = parse(ResonanceInput, payload)
    report = resonance_scan(decode_mus(model), model.m_max, model.conditions, tol=ctx.tol)
    return {"trunc": model.m_max, "report": report.model_dump()}

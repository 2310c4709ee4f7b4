"""Generating Hamiltonian of a symplectic map germ."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from ..codec import decode_mapjet, encode_jet, encode_matrix, parse
from ..maplog import map_log_report
from ..models import MapJetModel

if TYPE_CHECKING:
    from . import Context

DESCRIPTION = "map jet κ → p with κ = exp H_p, plus residual per degree"


def run(payload: Any, ctx: Context) -> dict[str, Any]:
    kappa = decode_mapjet(parse(MapJetModel, payload), ctx.field)
    kappa = kappa.truncate(ctx.order(kappa.trunc))
    out = map_log_report(kappa, ctx.branch)
    return {
        "trunc": kappa.trunc,
        "p": encode_jet(out.p),
        "B": encode_matrix(out.log.B, ctx.field),
        "residuals": {str(d): v for d, v in sorted(out.residuals.items())},
        "conditioning": {str(d): v for d, v in sorted(out.conditioning.items())},
        "resonance": out.resonance.model_dump(),
    }

"""Classical Birkhoff normal form."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from ..birkhoff import normalize
from ..codec import (
    decode_jet,
    encode_actions,
    encode_jet,
    encode_mapjet,
    encode_matrix,
    encode_qnf,
    parse,
)
from ..models import JetModel

if TYPE_CHECKING:
    from . import Context

DESCRIPTION = "Hamiltonian jet p → κ with p∘κ = p₀ + r, r resonant, and F(ι)"


def run(payload: Any, ctx: Context) -> dict[str, Any]:
    p = ctx.jet(decode_jet(parse(JetModel, payload), ctx.field))
    report = normalize(p)
    red = report.reduction
    return {
        "trunc": p.trunc,
        "kappa0": encode_matrix(report.kappa0, ctx.field),
        "kappa": encode_mapjet(red.kappa),
        "r": encode_jet(red.r),
        "F": encode_actions(report.actions),
        "quadratic": encode_qnf(red.qnf, ctx.field),
        "residuals": {
            "identity": red.identity_residual,
            "resonance": red.resonance_residual,
            "imaginary": red.imaginary_residual,
            "linear": red.qnf.residual,
        },
    }

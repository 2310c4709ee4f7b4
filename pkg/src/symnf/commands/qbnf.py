"""Quantum Birkhoff normal form of a full Weyl symbol."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from ..codec import decode_hjet, encode_actions, encode_hjet, encode_qnf, parse
from ..models import HJetModel
from ..weylq import symbol_normal_form

if TYPE_CHECKING:
    from . import Context

DESCRIPTION = "Weyl symbol P(ρ; h) → Q, R with e^{i ad_Q}P = P₀ + R, and F(ι; h)"


def run(payload: Any, ctx: Context) -> dict[str, Any]:
    P = ctx.hjet(decode_hjet(parse(HJetModel, payload), ctx.field))
    snf = symbol_normal_form(P)
    q = snf.quantum
    return {
        "trunc": P.trunc,
        "h_trunc": P.h_trunc,
        "Q": encode_hjet(q.Q),
        "R": encode_hjet(q.R),
        "F": encode_actions(snf.actions),
        "quadratic": encode_qnf(q.qnf, ctx.field),
        "linear_normalization": snf.linear_normalization,
        "residuals": {
            "conjugation": q.residual,
            "commutation": q.commutation_residual,
            "imaginary": q.imaginary_residual,
            "classical": snf.classical.identity_residual,
            "transport": snf.transport_drift,
        },
    }

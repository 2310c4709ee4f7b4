"""Logarithm of a formal Fourier integral operator."""

from __future__ import annotations

from dataclasses import replace
from typing import TYPE_CHECKING, Any

from ..codec import decode_fio, encode_hjet, parse
from ..models import FormalFIOModel
from ..weylq import operator_log

if TYPE_CHECKING:
    from . import Context

DESCRIPTION = "formal FIO (p_ref or κ, amplitude) → P with U = e^{−iP/h}"


def run(payload: Any, ctx: Context) -> dict[str, Any]:
    U = decode_fio(parse(FormalFIOModel, payload), ctx.field)
    U = replace(U, amp=ctx.hjet(U.amp))
    log = operator_log(U, homotopy=ctx.homotopy, winding=ctx.winding, branch=ctx.branch)
    return {
        "trunc": log.P.trunc,
        "h_trunc": log.P.h_trunc,
        "P": encode_hjet(log.P),
        "R": encode_hjet(log.R),
        "gauge": U.gauge,
        "gauge_shift": log.gauge_shift,
        "winding": log.winding,
        "homotopy": log.homotopy,
        "nodes": log.nodes,
        "residual": log.residual,
        "residual_orders": {str(k): v for k, v in sorted(log.residual_orders.items())},
    }

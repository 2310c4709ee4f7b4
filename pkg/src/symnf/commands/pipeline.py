"""Full chain: map log, operator log, classical and quantum normal forms."""

from __future__ import annotations

from dataclasses import replace
from typing import TYPE_CHECKING, Any

from ..codec import decode_fio, encode_actions, encode_qnf, parse
from ..models import FormalFIOModel
from ..weylq import fio_normal_form

if TYPE_CHECKING:
    from . import Context

DESCRIPTION = "formal FIO → F(ι; h) with V⁻¹UV = e^{−iF/h} (mod 2πh)"


def run(payload: Any, ctx: Context) -> dict[str, Any]:
    U = decode_fio(parse(FormalFIOModel, payload), ctx.field)
    U = replace(U, amp=ctx.hjet(U.amp))
    nf = fio_normal_form(U, homotopy=ctx.homotopy, winding=ctx.winding, branch=ctx.branch)
    return {
        "trunc": nf.actions.trunc,
        "h_trunc": nf.actions.h_trunc,
        "F": encode_actions(nf.actions),
        "quadratic": encode_qnf(nf.quantum.qnf, ctx.field),
        "metadata": dict(sorted(nf.metadata.items())),
        "residuals": {
            "oplog": nf.oplog.residual,
            "classical": nf.classical.identity_residual,
            "conjugation": nf.quantum.residual,
            "commutation": nf.quantum.commutation_residual,
        },
    }

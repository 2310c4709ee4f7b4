"""Real logarithm of a symplectic matrix."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from ..codec import (
    decode_matrix,
    decode_spectrum,
    encode_lattice,
    encode_matrix,
    encode_scalar,
    parse,
)
from ..fields import GaussianRational, LatticeValue, get_field
from ..models import MatrixModel
from ..symlin import symplectic_log

if TYPE_CHECKING:
    from . import Context

DESCRIPTION = "symplectic matrix A → real Hamiltonian B with exp B = A"


def _scalar(value: Any) -> dict[str, Any]:
    if isinstance(value, LatticeValue):
        return encode_lattice(value)
    exact = isinstance(value, GaussianRational)
    return encode_scalar(value, get_field("exact" if exact else "float"))


def run(payload: Any, ctx: Context) -> dict[str, Any]:
    model = parse(MatrixModel, payload)
    f = ctx.field
    log = symplectic_log(
        decode_matrix(model, f),
        ctx.branch,
        field=f,
        windings=model.windings or None,
        exact_spectrum=decode_spectrum(model, f),
    )
    blocks = [
        {
            "kind": b.kind,
            "eigenvalue": _scalar(b.representative),
            "mu": _scalar(b.mu),
            "multiplicity": b.multiplicity,
            "jordan_ranks": list(b.jordan_ranks),
        }
        for b in log.spectral.blocks
    ]
    report: dict[str, Any] = {
        "trunc": 1,
        "B": encode_matrix(log.B, f),
        "blocks": blocks,
        "residuals": dict(log.residuals),
        "spectral": {
            "cluster_rtol": log.spectral.cluster_rtol,
            "orthogonality": log.spectral.orthogonality_residual,
            **{k: str(v) for k, v in log.spectral.metadata.items()},
        },
    }
    if log.lattice_part is not None:
        # exp(B + 2π·B_2pi) = A
        report["B_2pi"] = encode_matrix(log.lattice_part, f)
    return report

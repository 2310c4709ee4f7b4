"""
Quantum Birkhoff normal form and the composite normal form of an FIO.

quantum_bnf finds Q = q₀ + hq₁ + … with e^{i ad_Q} P = P₀ + R, where
ad_Q X = Q # X − X # Q and every layer of R is resonant. The defect of
layer k+1 is removed by q_k from the H_p equation of the classical layer.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import structlog

from ..birkhoff import (
    ActionExpression,
    BirkhoffResult,
    QuadraticNormalForm,
    birkhoff_reduce,
    layers_to_actions,
    quadratic_normalize,
)
from ..errors import PreconditionError
from ..homology import is_resonant, solve_h_p
from ..jetcalc import GradedOperator, HJet, HJetBasis, linear_pullback
from ..jetcalc.matrices import symplectic_inverse
from ..metrics import track_stage
from ..symlin import hamilton_matrix
from .moyal import commutator
from .oplog import FormalFIO, Homotopy, OperatorLogResult, conjugation_transport, operator_log

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class QuantumNormalForm:
    Q: HJet
    R: HJet
    P0: HJet
    qnf: QuadraticNormalForm
    residual: float = 0.0
    commutation_residual: float = 0.0
    imaginary_residual: float = 0.0


def adjoint_exp(Q: HJet, X: HJet) -> HJet:
    """e^{i ad_Q} X; i ad_Q raises the weight, so the series terminates."""
    f = X.field
    op = GradedOperator(
        lambda y: commutator(Q, y).scale(f.i),
        HJetBasis(X.n_dof, X.trunc, X.h_trunc, f),
        nilpotent=True,
        name="adjoint",
    )
    return op.exp_apply(X)


def _pullback(P: HJet, matrix: Any) -> HJet:
    return P.map_layers(lambda layer: linear_pullback(layer, matrix))


def quantum_bnf(P: HJet, qnf: QuadraticNormalForm | None = None) -> QuantumNormalForm:
    """Q, R with e^{i ad_Q} P = P₀ + R up to (N, M); layer 0 of P must be normal."""
    N, M = P.trunc, P.h_trunc
    f = P.field
    n = P.n_dof
    layer0 = P.layer(0)
    if any(sum(e) < 2 for e in layer0.terms):
        raise PreconditionError("classical layer must vanish to second order at 0")
    q = qnf or QuadraticNormalForm.from_quadratic(layer0.degree_part(2))
    p0 = q.quadratic_part(N)
    if not (layer0.degree_part(2) - p0).is_zero():
        raise PreconditionError("quadratic part does not match the normal form")

    C = q.complexifier()
    C_inv = symplectic_inverse(C, f)
    pc0 = q.diagonal_part(N)
    Pc = _pullback(P, C)
    Pc = HJet([pc0 + Pc.layer(0).degree_range(3, N), *Pc.layers[1:]], N, M)
    if not is_resonant(Pc.layer(0).degree_range(3, N)):
        raise PreconditionError("classical layer is not in normal form; run birkhoff_reduce")

    Qc = HJet.zero(n, N, M, f)
    current = Pc
    for k in range(M):
        defect = current.layer(k + 1)
        if defect.is_zero(0.0):
            continue
        step = solve_h_p(defect, current.layer(0), stage="qbnf").u
        if step.is_zero(0.0):
            continue
        Qc = Qc + HJet.from_jet(step, N, M).h_shift(k)
        current = adjoint_exp(Qc, Pc)
        logger.debug("qbnf_layer", h_order=k + 1, generator=step.max_abs())

    P0c = HJet.from_jet(pc0, N, M)
    Rc = current - P0c
    Q, R = _pullback(Qc, C_inv), _pullback(Rc, C_inv)
    P0 = HJet.from_jet(p0, N, M)
    imaginary = 0.0
    if P.is_real():
        imaginary = max(Q.imag_part().max_abs(), R.imag_part().max_abs())
        if imaginary > max(f.tol, 1e-8):
            logger.warning("qbnf_not_real", imaginary=imaginary)
        if not f.exact:
            Q, R = Q.real_part(), R.real_part()

    residual = (adjoint_exp(Q, P) - (P0 + R)).max_abs()
    commutation = commutator(P0, R).max_abs()
    logger.info("qbnf_done", trunc=N, h_trunc=M, residual=residual, commutation=commutation)
    return QuantumNormalForm(
        Q=Q,
        R=R,
        P0=P0,
        qnf=q,
        residual=residual,
        commutation_residual=commutation,
        imaginary_residual=imaginary,
    )


# ── Composite normal form ──


@dataclass(frozen=True)
class SymbolNormalForm:
    """Classical reduction of layer 0 transported to every layer, then quantum BNF."""

    actions: ActionExpression
    classical: BirkhoffResult
    quantum: QuantumNormalForm
    linear_normalization: bool = False
    transport_drift: float = 0.0


@dataclass(frozen=True)
class FIONormalForm:
    actions: ActionExpression
    oplog: OperatorLogResult
    classical: BirkhoffResult
    quantum: QuantumNormalForm
    metadata: dict[str, Any] = field(default_factory=dict)


def symbol_normal_form(P: HJet) -> SymbolNormalForm:
    """F(ι; h) for a full symbol P whose layer 0 vanishes to second order."""
    N = P.trunc
    f = P.field
    normalized = False
    with track_stage("birkhoff"):
        p2 = P.layer(0).degree_part(2)
        try:
            qnf = QuadraticNormalForm.from_quadratic(p2)
        except PreconditionError:
            if f.exact:
                raise
            qnf = quadratic_normalize(hamilton_matrix(p2))
            P = _pullback(P, qnf.kappa0)
            normalized = True
        classical = birkhoff_reduce(P.layer(0), N, qnf)

    with track_stage("transport"):
        for g in classical.generators:
            P = conjugation_transport(HJet.from_jet(g, N, P.h_trunc), P)
        reduced = classical.p0 + classical.r
        drift = (P.layer(0) - reduced).max_abs()
        tol = f.tol * max(1.0, reduced.max_abs())
        if drift > tol:
            logger.warning("transport_drift", drift=drift, tol=tol)
        else:
            logger.debug("transport_done", generators=len(classical.generators), drift=drift)
        P = HJet([reduced, *P.layers[1:]], N, P.h_trunc)

    with track_stage("qbnf"):
        quantum = quantum_bnf(P, qnf)

    with track_stage("actions"):
        total = quantum.P0 + quantum.R
        F = layers_to_actions(list(total.layers), qnf, N)
    return SymbolNormalForm(
        actions=F,
        classical=classical,
        quantum=quantum,
        linear_normalization=normalized,
        transport_drift=drift,
    )


def fio_normal_form(
    U: FormalFIO,
    *,
    homotopy: Homotopy = "exponential",
    winding: int = 0,
    branch: str = "principal",
    windings: Mapping[int, int] | None = None,
) -> FIONormalForm:
    """F(ι; h) with V⁻¹UV = e^{−iF(ι; h)/h} up to the amplitude's resolution."""
    with track_stage("maplog"):
        U = U.resolved(branch, windings=windings)
    with track_stage("oplog"):
        log = operator_log(U, homotopy=homotopy, winding=winding, branch=branch)
    snf = symbol_normal_form(log.P)

    metadata = {
        "branch": branch,
        "homotopy": homotopy,
        "winding": winding,
        "gauge_shift": log.gauge_shift,
        "gauge": U.gauge,
        "linear_normalization": snf.linear_normalization,
        "transport_drift": snf.transport_drift,
    }
    logger.info("fio_normal_form_done", trunc=log.P.trunc, h_trunc=log.P.h_trunc, **metadata)
    return FIONormalForm(
        actions=snf.actions,
        oplog=log,
        classical=snf.classical,
        quantum=snf.quantum,
        metadata=metadata,
    )

"""
Logarithm of an elliptic Fourier integral operator at symbol level.

A formal FIO is the pair (p_ref, A) standing for U = e^{−iP₀/h}·Op(A),
P₀ = p_ref. The logarithm is P = P₀ + hR with U = e^{−iP/h}. Along a
homotopy A_s from 1 to A, Duhamel's formula gives the rate equation

    φ₁(G_{P_s}) ∂_sR_s = i A_s⁻¹ # ∂_sA_s,   G_P(Y) = (i/h)[P, Y],

which is solved by polynomial collocation in s with Picard sweeps; each
sweep fixes one more h-order of R.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

import numpy as np
import structlog
from numpy.polynomial import chebyshev

from ..errors import FieldError, PreconditionError
from ..fields import Field
from ..homology import check_averaged
from ..jetcalc import GradedOperator, HJet, HJetBasis, Jet, MapJet
from ..maplog import map_log
from .moyal import moyal, quantum_bracket, star_inverse, star_log

logger = structlog.get_logger(__name__)

Homotopy = Literal["exponential", "linear"]


@dataclass(frozen=True)
class FormalFIO:
    """e^{−iP₀/h}·Op(amp); ``p_ref`` may be derived from ``kappa`` with map_log."""

    amp: HJet
    p_ref: Jet | None = None
    gauge: int = 0
    kappa: MapJet | None = None

    def __post_init__(self) -> None:
        if self.p_ref is None and self.kappa is None:
            raise PreconditionError("a formal FIO needs p_ref or kappa")
        f = self.amp.field
        if f.is_zero(self.amp.constant_term()):
            raise PreconditionError("amplitude is not elliptic: a₀(0) = 0")
        if self.p_ref is not None and self.p_ref.field.name != f.name:
            raise FieldError("mixed coefficient fields in one computation")

    def resolved(self, branch: str = "principal", **kwargs: Any) -> FormalFIO:
        """Same FIO with p_ref filled in from kappa."""
        if self.p_ref is not None:
            return self
        if self.kappa is None:
            raise PreconditionError("a formal FIO needs p_ref or kappa")
        p_ref = map_log(self.kappa, branch, **kwargs)
        return FormalFIO(amp=self.amp, p_ref=p_ref, gauge=self.gauge, kappa=self.kappa)


@dataclass(frozen=True)
class OperatorLogResult:
    P: HJet
    R: HJet
    gauge_shift: int = 0
    winding: int = 0
    homotopy: str = "exponential"
    nodes: int = 0
    residual: float = 0.0
    residual_orders: dict[int, float] = field(default_factory=dict)


# ── Symbol bookkeeping ──


def _check_reference(p_ref: Jet) -> None:
    if any(sum(e) < 2 for e in p_ref.terms):
        raise PreconditionError("p_ref must vanish to second order at 0")


def assemble(p_ref: Jet, R: HJet) -> HJet:
    """P = p_ref + hR at (N+2, M+1) for R at (N, M)."""
    N, M = R.trunc, R.h_trunc
    return HJet([p_ref.truncate(N + 2), *R.layers], N + 2, M + 1)


def remainder(P: HJet, p_ref: Jet | None = None) -> HJet:
    """R = (P − P₀)/h at (N−2, M−1)."""
    p0 = P.layer(0) if p_ref is None else p_ref
    return (P - HJet.from_jet(p0.truncate(P.trunc), P.trunc, P.h_trunc)).h_divide()


def generator_operator(
    P: HJet, trunc: int, h_trunc: int, name: str = "conjugation"
) -> GradedOperator:
    """Y ↦ (i/h)[P, Y] on h-jets at (trunc, h_trunc)."""
    _check_reference(P.layer(0))
    basis = HJetBasis(P.n_dof, trunc, h_trunc, P.field)
    nilpotent = P.layer(0).degree_part(2).is_zero(0.0)
    return GradedOperator(
        lambda y: quantum_bracket(P, y), basis, nilpotent=nilpotent, name=name
    )


def conjugation_transport(P: HJet, A: HJet, t: Any = 1) -> HJet:
    """Symbol of e^{itP/h} Op(A) e^{−itP/h} at A's truncation."""
    return generator_operator(P, A.trunc, A.h_trunc).exp_apply(A, t)


def reconstruct_amplitude(P: HJet, p_ref: Jet | None = None) -> HJet:
    """A with e^{−iP/h} = e^{−iP₀/h}·Op(A), at (N−2, M−1) for P at (N, M).

    A = exp(Γ)(1) with Γ(Y) = (i/h)[P₀, Y] − i Y # R.
    """
    p0 = P.layer(0) if p_ref is None else p_ref
    _check_reference(p0)
    R = remainder(P, p0)
    f = P.field
    N, M = R.trunc, R.h_trunc
    const = R.constant_term()
    Rc = R - const
    P0 = HJet.from_jet(p0.truncate(P.trunc), P.trunc, P.h_trunc)

    def gamma(y: HJet) -> HJet:
        return quantum_bracket(P0, y) - moyal(y, Rc).scale(f.i)

    op = GradedOperator(
        gamma,
        HJetBasis(P.n_dof, N, M, f),
        nilpotent=p0.degree_part(2).is_zero(0.0),
        name="amplitude",
    )
    one = HJet.constant(1, P.n_dof, N, M, f)
    return op.exp_apply(one).scale(f.exp(-f.i * const))


# ── Collocation in s ──


def collocation_nodes(degree: int, f: Field) -> list[Any]:
    """degree+1 nodes on [0, 1] including both ends."""
    D = max(degree, 1)
    if f.exact:
        return [Fraction(k, D) for k in range(D + 1)]
    return [(1 - math.cos(math.pi * k / D)) / 2 for k in range(D + 1)]


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def integration_matrix(nodes: Sequence[Any], f: Field) -> list[list[Any]]:
    """W[l][k] = ∫₀^{s_l} ℓ_k(s) ds for the Lagrange basis ℓ_k on ``nodes``."""
    D = len(nodes) - 1
    if f.exact:
        W = [[Fraction(0)] * (D + 1) for _ in range(D + 1)]
        for k, sk in enumerate(nodes):
            poly = [Fraction(1)]
            for m, sm in enumerate(nodes):
                if m != k:
                    poly = _poly_mul(poly, [-sm / (sk - sm), 1 / (sk - sm)])
            integral = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(poly)]
            for l_, sl in enumerate(nodes):
                W[l_][k] = sum((c * sl**i for i, c in enumerate(integral)), Fraction(0))
        return W
    x = 2 * np.asarray(nodes, dtype=float) - 1
    W = np.zeros((D + 1, D + 1))
    for k in range(D + 1):
        coeffs = chebyshev.chebfit(x, np.eye(D + 1)[k], D)
        W[:, k] = chebyshev.chebval(x, chebyshev.chebint(coeffs, lbnd=-1)) / 2
    return W.tolist()


# ── Operator logarithm ──


def _rate_source(
    A: HJet, homotopy: Homotopy, winding: int
) -> tuple[Callable[[Any], HJet], int]:
    """s ↦ i A_s⁻¹ # ∂_sA_s and the s-degree bound of ∂_sR."""
    f = A.field
    N, M = A.trunc, A.h_trunc
    if homotopy == "exponential":
        source = star_log(A, winding).scale(f.i)
        return (lambda s: source), M
    if homotopy == "linear":
        c = A.constant_term()
        lam = f.log(c, winding)
        X = A.scale(f.one / c) - 1

        def linear(s: Any) -> HJet:
            inv = star_inverse(X.scale(s) + 1)
            return (moyal(inv, X) + lam).scale(f.i)

        return linear, max(N * (M + 1) - 1, 0)
    raise PreconditionError("unknown homotopy", homotopy=homotopy)


def canonical_gauge(R: HJet, f: Field, gauge: int = 0) -> tuple[HJet, int]:
    """Move the constant of R's h⁰ layer into (−π, π], then add 2π·gauge."""
    c = R.constant_term()
    if f.exact:
        if gauge:
            raise FieldError("2πh gauge shifts are not representable exactly", gauge=gauge)
        if not -math.pi < complex(c).real <= math.pi:
            logger.warning("gauge_not_canonical", constant=str(c))
        return R, 0
    re = complex(c).real
    k = round(re / (2 * math.pi))
    shifted = re - 2 * math.pi * k
    if shifted <= -math.pi:
        k -= 1
    elif shifted > math.pi:
        k += 1
    shift = gauge - k
    if shift:
        R = R + 2 * math.pi * shift
    return R, shift


def operator_log(
    U: FormalFIO,
    *,
    homotopy: Homotopy = "exponential",
    winding: int = 0,
    gauge_fix: bool = True,
    branch: str = "principal",
    windings: Mapping[int, int] | None = None,
) -> OperatorLogResult:
    """P with U = e^{−iP/h}; P has layer 0 = p_ref and lives at (N+2, M+1).

    (N, M) is the amplitude's resolution, capped by the resolution of p_ref.
    """
    p_ref = U.resolved(branch, windings=windings).p_ref
    if p_ref is None:
        raise PreconditionError("a formal FIO needs p_ref or kappa")
    _check_reference(p_ref)
    f = U.amp.field
    N = min(U.amp.trunc, p_ref.trunc - 2)
    M = U.amp.h_trunc
    if N < 0:
        raise PreconditionError("p_ref is not resolved beyond the amplitude", trunc=p_ref.trunc)
    A = U.amp.truncate(N, M)
    n = A.n_dof
    if not p_ref.degree_part(2).is_zero(0.0):
        check_averaged(p_ref.degree_part(2), range(1, N + 1), stage="oplog")

    source, degree = _rate_source(A, homotopy, winding)
    nodes = collocation_nodes(degree, f)
    W = integration_matrix(nodes, f)
    zero = HJet.zero(n, N, M, f)
    R_nodes = [zero] * len(nodes)
    rates_cache = [source(s) for s in nodes]
    for sweep in range(M + 1):
        rates = []
        for R_s, w in zip(R_nodes, rates_cache, strict=True):
            op = generator_operator(assemble(p_ref, R_s), N, M, name="operator_log")
            rates.append(op.phi1_solve(w))
        R_nodes = []
        for row in W:
            acc = zero
            for wk, rate in zip(row, rates, strict=True):
                if wk:
                    acc = acc + rate.scale(wk)
            R_nodes.append(acc)
        logger.debug("operator_log_sweep", sweep=sweep, nodes=len(nodes))

    R = R_nodes[-1]
    shift = 0
    if gauge_fix:
        R, shift = canonical_gauge(R, f, U.gauge)
    P = assemble(p_ref, R)

    rebuilt = reconstruct_amplitude(P, p_ref)
    diff = rebuilt - A
    orders = {j: diff.layer(j).max_abs() for j in range(M + 1)}
    residual = max(orders.values(), default=0.0)
    logger.info(
        "operator_log_done",
        trunc=N,
        h_trunc=M,
        homotopy=homotopy,
        gauge_shift=shift,
        residual=residual,
    )
    return OperatorLogResult(
        P=P,
        R=R,
        gauge_shift=shift,
        winding=winding,
        homotopy=homotopy,
        nodes=len(nodes),
        residual=residual,
        residual_orders=orders,
    )


def gauge_difference(P1: HJet, P2: HJet) -> float | None:
    """k with P1 − P2 = 2πh·k (k as a float), or None if they differ otherwise."""
    if not P1.layer(0).allclose(P2.layer(0)):
        return None
    diff = P1 - P2
    R = HJet(list(diff.layers[1:]) or [diff.layer(0)], diff.trunc - 2, max(diff.h_trunc - 1, 0))
    c = R.constant_term()
    if not (R - c).is_zero():
        return None
    return complex(c).real / (2 * math.pi)

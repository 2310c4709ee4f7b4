"""
Logarithm of a symplectic map germ: the jet p with κ = exp H_p up to N.

The quadratic part comes from the real logarithm of dκ(0); higher degrees
are fixed one at a time. At degree d the current p reproduces κ through
degree d−2, the discrepancy κ⁻¹∘exp H_p − id is −H_w with w homogeneous of
degree d, and the correction solves the averaged equation
∫₀¹ δ∘exp(tH_{p₀}) dt = w.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import structlog

from .errors import FieldError, PreconditionError
from .homology import averaged_conditioning, raise_first, resonance_scan, solve_averaged
from .jetcalc import Jet, MapJet, flow_jet
from .models import ResonanceReport
from .symlin import ExactCluster, LogResult, quadratic_form, symplectic_log

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class MapLogResult:
    p: Jet
    log: LogResult
    resonance: ResonanceReport
    residuals: dict[int, float] = field(default_factory=dict)
    conditioning: dict[int, float] = field(default_factory=dict)


def flow_discrepancy(p: Jet, kappa: MapJet, kappa_inv: MapJet | None = None) -> list[Jet]:
    """Components of κ⁻¹∘exp H_p − id."""
    kinv = kappa.inverse() if kappa_inv is None else kappa_inv
    flow = flow_jet(p, 1, kappa.trunc)
    ident = MapJet.identity(kappa.n_dof, kappa.trunc, kappa.field)
    return kinv.compose(flow) - ident


def _generator_from_field(E: Sequence[Jet], d: int) -> Jet:
    """w from E = −H_w at degree d−1 (Euler identity)."""
    n = len(E) // 2
    first = E[0]
    acc = Jet.zero(first.n_dof, first.trunc + 1, first.field)
    for i in range(n):
        x_i = Jet.x(i, n, first.trunc + 1, first.field)
        xi_i = Jet.xi(i, n, first.trunc + 1, first.field)
        ex = E[i].degree_part(d - 1).with_trunc(first.trunc + 1)
        exi = E[n + i].degree_part(d - 1).with_trunc(first.trunc + 1)
        acc = acc + x_i * exi - xi_i * ex
    return acc.scale(first.field.one / d)


def map_log_report(
    kappa: MapJet,
    branch: str = "principal",
    *,
    windings: Mapping[int, int] | None = None,
    exact_spectrum: Sequence[ExactCluster] | None = None,
) -> MapLogResult:
    N = kappa.trunc
    f = kappa.field
    if N < 1:
        raise PreconditionError("map jet must be resolved at least to degree 1")
    log = symplectic_log(
        kappa.linear_part(), branch, field=f, windings=windings, exact_spectrum=exact_spectrum
    )
    mus = log.spectral.representative_mus()
    if mus:
        report = resonance_scan(mus, N + 1, ("flow-log",), tol=max(f.tol, 1e-9))
    else:
        report = ResonanceReport(
            mus=[], degree_bound=N + 1, conditions=["flow-log"], verdicts={"flow-log": True}
        )
    raise_first(report, "flow-log", stage="maplog")
    if log.lattice_part is not None:
        raise FieldError(
            "linear log has a 2π-multiple part; its jet is not exact", stage="maplog"
        )
    p0 = quadratic_form(log.B, N + 1, f)
    real_input = all(c.is_real() for c in kappa.components)

    kinv = kappa.inverse()
    p = p0
    conditioning: dict[int, float] = {}
    for d in range(3, N + 2):
        E = flow_discrepancy(p, kappa, kinv)
        w = _generator_from_field(E, d)
        if w.is_zero(0.0):
            continue
        delta = solve_averaged(w, p0, stage="maplog")
        if real_input and not f.exact:
            delta = delta.real_part()
        p = p + delta
        conditioning[d] = averaged_conditioning(p0, d)
        logger.debug("map_log_degree", degree=d, correction=delta.max_abs())

    E = flow_discrepancy(p, kappa, kinv)
    residuals = {
        d: max(c.degree_part(d).max_abs() for c in E) for d in range(1, N + 1)
    }
    logger.info("map_log_done", trunc=N, field=f.name, worst=max(residuals.values(), default=0.0))
    return MapLogResult(
        p=p, log=log, resonance=report, residuals=residuals, conditioning=conditioning
    )


def map_log(
    kappa: MapJet,
    branch: str = "principal",
    *,
    windings: Mapping[int, int] | None = None,
    exact_spectrum: Sequence[ExactCluster] | None = None,
) -> Jet:
    """p with flow_jet(p, 1, N) = κ up to degree N; p is resolved to degree N+1."""
    return map_log_report(kappa, branch, windings=windings, exact_spectrum=exact_spectrum).p


def map_log_uniqueness_check(p1: Jet, p2: Jet, trunc: int) -> bool:
    """Two logarithms agree iff p1 − p2 vanishes up to ``trunc``."""
    return (p1 - p2).truncate(trunc).is_zero()


def flow_divergence_degree(p1: Jet, p2: Jet, trunc: int, tol: float | None = None) -> int | None:
    """Smallest degree at which the time-1 flows of p1 and p2 differ."""
    diff = flow_jet(p1, 1, trunc) - flow_jet(p2, 1, trunc)
    for d in range(1, trunc + 1):
        if any(not c.degree_part(d).is_zero(tol) for c in diff):
            return d
    return None

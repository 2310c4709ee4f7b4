"""
Resonance analysis and homological equations.

Two linear problems are solved degree by degree:

* the averaged transport u ↦ ∫₀¹ u∘exp(tH_{p₀}) dt = φ₁(L)u, L u = {p₀, u},
  which is the correction operator of the map logarithm;
* the H_{p₀} / H_p equations H u = v + r with r resonant, used by the
  classical and quantum normal forms.

Splittings are gauge-fixed: u never contains resonant monomials.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from itertools import product
from typing import Any

import numpy as np
import scipy.linalg
import structlog

from .config import settings
from .errors import PreconditionError, ResonanceError
from .fields import Field, FloatField, GaussianRational, LatticeValue
from .jetcalc import GradedOperator, Jet, JetBasis, poisson
from .jetcalc.monomials import Exponent, split
from .metrics import resonance_rejections_total
from .models import ResonanceReport, Violation

logger = structlog.get_logger(__name__)

_FLOAT = FloatField()

CONDITIONS = ("flow-log", "birkhoff", "combined", "averaged")


def _combination(k: Sequence[int], mus: Sequence[Any]) -> Any:
    if isinstance(mus[0], LatticeValue):
        out = LatticeValue(GaussianRational.lift(0))
        for kj, m in zip(k, mus, strict=True):
            if kj:
                out = out + kj * m
        return out
    return sum((kj * complex(m) for kj, m in zip(k, mus, strict=True)), 0j)


def _classify(value: Any, tol: float) -> tuple[bool, int | None]:
    """(is zero, index in 2πiℤ or None)."""
    if isinstance(value, LatticeValue):
        return value.is_zero(), value.lattice_index()
    z = complex(value)
    k = round(z.imag / (2 * math.pi))
    scale = max(1.0, abs(z))
    on_lattice = abs(z - 2j * math.pi * k) <= tol * scale
    return abs(z) <= tol * scale, (k if on_lattice else None)


def _lattice_gap(value: Any) -> float:
    z = complex(value)
    k = round(z.imag / (2 * math.pi))
    return abs(z - 2j * math.pi * k)


def integer_vectors(n: int, m_max: int, *, up_to_sign: bool = True) -> Iterator[tuple[int, ...]]:
    """Nonzero k ∈ ℤⁿ with |k|₁ ≤ m_max (one representative of ±k)."""
    for k in product(range(-m_max, m_max + 1), repeat=n):
        s = sum(abs(v) for v in k)
        if s == 0 or s > m_max:
            continue
        if up_to_sign and next(v for v in k if v) < 0:
            continue
        yield k


def nonnegative_vectors(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """k ∈ ℕⁿ with |k|₁ = m."""
    if n == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in nonnegative_vectors(n - 1, m - first):
            yield (first, *rest)


def _encode_mu(mu: Any) -> list[float]:
    z = complex(mu)
    return [z.real, z.imag]


def resonance_scan(
    mus: Sequence[Any],
    m_max: int,
    conditions: Iterable[str] = ("flow-log", "birkhoff", "combined"),
    *,
    tol: float | None = None,
    degree_range: Iterable[int] | None = None,
) -> ResonanceReport:
    """Exhaustive scan of integer relations Σ k_j μ_j within the degree bound.

    Exact scans take ``LatticeValue`` (or Gaussian rational) entries; float
    scans take complex numbers and test against ``tol``.
    """
    conds = list(conditions)
    for c in conds:
        if c not in CONDITIONS:
            raise PreconditionError("unknown resonance condition", condition=c)
    if m_max < 1:
        raise PreconditionError("degree bound must be positive", m_max=m_max)
    t = settings.tol if tol is None else tol
    exact = bool(mus) and isinstance(mus[0], LatticeValue | GaussianRational)
    values: list[Any] = [LatticeValue.lift(m) for m in mus] if exact else [complex(m) for m in mus]
    violations: list[Violation] = []
    verdicts = {c: True for c in conds}
    gap = math.inf

    signed = [c for c in conds if c != "averaged"]
    if values and signed:
        for k in integer_vectors(len(values), m_max):
            s = _combination(k, values)
            zero, index = _classify(s, t)
            hit = {
                "flow-log": index is not None and not zero,
                "birkhoff": zero,
                "combined": index is not None,
            }
            bad = False
            for c in signed:
                if hit[c]:
                    bad = True
                    verdicts[c] = False
                    violations.append(
                        Violation(
                            condition=c, k=list(k), value=_encode_mu(s), degree=sum(map(abs, k))
                        )
                    )
            if not bad and not zero:
                gap = min(gap, _lattice_gap(s))

    if "averaged" in conds and values:
        full = values + [-v for v in values]
        degrees = list(degree_range) if degree_range is not None else range(2, m_max + 1)
        for m in degrees:
            for k in nonnegative_vectors(len(full), m):
                s = _combination(k, full)
                zero, index = _classify(s, t)
                if index is not None and not zero:
                    verdicts["averaged"] = False
                    violations.append(
                        Violation(condition="averaged", k=list(k), value=_encode_mu(s), degree=m)
                    )
                elif not zero:
                    gap = min(gap, _lattice_gap(s))

    report = ResonanceReport(
        mus=[_encode_mu(m) for m in values],
        exact=exact,
        degree_bound=m_max,
        conditions=conds,
        verdicts=verdicts,
        violations=violations,
        min_gap=None if math.isinf(gap) else gap,
    )
    if violations:
        logger.info("resonances_found", count=len(violations), conditions=conds)
    return report


def raise_first(report: ResonanceReport, condition: str, stage: str | None = None) -> None:
    for v in report.violations:
        if v.condition == condition:
            resonance_rejections_total.labels(condition=condition).inc()
            raise ResonanceError(
                f"non-resonance condition '{condition}' fails at degree {v.degree}",
                k=v.k,
                degree=v.degree,
                value=complex(*v.value),
                condition=condition,
                stage=stage,
            )


# ── Quadratic parts ──


def _check_quadratic(p0: Jet) -> None:
    if any(sum(e) != 2 for e in p0.terms):
        raise PreconditionError("p0 must be a homogeneous quadratic form")


def diagonal_mus(p0: Jet) -> list[Any] | None:
    """μ with p0 = Σ μ_j x_j ξ_j, or None if p0 is not of that form."""
    n = p0.n_dof
    mus = [p0.field.zero] * n
    for e, c in p0.terms.items():
        if sum(e) != 2:
            return None
        j = next(i for i, v in enumerate(e) if v)
        if j >= n or e[n + j] != 1:
            return None
        mus[j] = c
    return mus


def _weight(e: Exponent, mus: Sequence[Any], field: Field) -> tuple[Any, tuple[int, ...]]:
    alpha, beta = split(e)
    k = tuple(a - b for a, b in zip(alpha, beta, strict=True))
    w = field.zero
    for kj, m in zip(k, mus, strict=True):
        if kj:
            w = w + m * kj
    return w, k


def _lie_operator(p0: Jet, degree: int, trunc: int) -> GradedOperator:
    basis = JetBasis(p0.n_dof, degree, degree, trunc, p0.field)
    return GradedOperator(lambda u: poisson(p0, u, trunc), basis, name="averaged_transport")


def _b_eigenvalues(p0: Jet) -> list[complex]:
    from .symlin import hamilton_matrix

    B = hamilton_matrix(p0)
    if B.dtype == object:
        B = np.vectorize(complex, otypes=[complex])(B)
    return [complex(z) for z in scipy.linalg.eigvals(B)]


# ── Averaged transport ──


def averaged_transport(u: Jet, p0: Jet) -> Jet:
    """∫₀¹ u∘exp(tH_{p₀}) dt, degree by degree."""
    _check_quadratic(p0)
    if u.is_zero(0.0):
        return u
    f = u.field
    mus = diagonal_mus(p0)
    if mus is not None:
        out: dict[Exponent, Any] = {}
        for e, c in u.terms.items():
            beta, _ = _weight(e, mus, f)
            out[e] = c * f.phi1(beta)
        return Jet._raw(u.n_dof, u.trunc, f, out)
    out_jet = Jet.zero(u.n_dof, u.trunc, f)
    for d in u.degrees():
        op = _lie_operator(p0, d, u.trunc)
        out_jet = out_jet + op.phi1_apply(u.degree_part(d))
    return out_jet


def check_averaged(
    p0: Jet, degrees: Sequence[int], *, tol: float | None = None, stage: str | None = None
) -> None:
    """Raise if the averaged operator of p₀ is singular in one of ``degrees``."""
    degrees = [d for d in degrees if d > 0]
    d_list = _b_eigenvalues(p0)
    if not degrees or not any(abs(z) > 0 for z in d_list):
        return
    # eigenvalues of B come in ± pairs; scan with the first half as μ
    half = sorted(d_list, key=lambda z: (-z.real, -z.imag))[: len(d_list) // 2]
    report = resonance_scan(half, max(degrees), ("averaged",), tol=tol, degree_range=degrees)
    raise_first(report, "averaged", stage)


def solve_averaged(v: Jet, p0: Jet, *, stage: str | None = None) -> Jet:
    """u with averaged_transport(u, p0) = v."""
    _check_quadratic(p0)
    if v.is_zero(0.0):
        return v
    f = v.field
    mus = diagonal_mus(p0)
    if mus is not None:
        out: dict[Exponent, Any] = {}
        for e, c in v.terms.items():
            beta, k = _weight(e, mus, f)
            index = f.lattice_index(beta)
            if index:
                resonance_rejections_total.labels(condition="averaged").inc()
                raise ResonanceError(
                    "averaged operator vanishes on a monomial (β ∈ 2πiℤ∖0)",
                    k=k,
                    degree=sum(e),
                    value=f.to_complex(beta),
                    condition="averaged",
                    stage=stage,
                )
            out[e] = c / f.phi1(beta)
        return Jet._raw(v.n_dof, v.trunc, f, out)

    check_averaged(p0, [d for d in v.degrees() if d > 0], tol=max(f.tol, 1e-9), stage=stage)
    out_jet = Jet.zero(v.n_dof, v.trunc, f)
    for d in v.degrees():
        op = _lie_operator(p0, d, v.trunc)
        out_jet = out_jet + op.phi1_solve(v.degree_part(d))
    return out_jet


def averaged_conditioning(p0: Jet, degree: int) -> float:
    """min |(e^β − 1)/β| over the eigenvalues β of the degree-``degree`` Lie action."""
    _check_quadratic(p0)
    d_list = _b_eigenvalues(p0) if diagonal_mus(p0) is None else None
    if d_list is None:
        mus = [complex(m) for m in diagonal_mus(p0) or []]
        d_list = mus + [-m for m in mus]
    worst = math.inf
    for k in nonnegative_vectors(len(d_list), degree):
        beta = sum((kj * d for kj, d in zip(k, d_list, strict=True)), 0j)
        worst = min(worst, abs(_FLOAT.phi1(beta)))
    return worst


# ── H_{p₀} / H_p equations ──


@dataclass(frozen=True)
class ResonantSplit:
    u: Jet
    r: Jet


def solve_h_p0(v: Jet, p0: Jet, *, stage: str | None = None) -> ResonantSplit:
    """H_{p₀}u = v + r for diagonal p₀ = Σ μ_j x_j ξ_j; r resonant, u nonresonant."""
    mus = diagonal_mus(p0)
    if mus is None:
        raise PreconditionError("p0 must be diagonal: Σ μ_j x_j ξ_j")
    f = v.field
    u: dict[Exponent, Any] = {}
    r: dict[Exponent, Any] = {}
    for e, c in v.terms.items():
        alpha, beta = split(e)
        if alpha == beta:
            r[e] = -c
            continue
        omega, k = _weight(e, mus, f)
        if f.is_zero(omega, f.tol * max(1.0, max(abs(complex(m)) for m in mus))):
            resonance_rejections_total.labels(condition="birkhoff").inc()
            raise ResonanceError(
                "Σ k_j μ_j = 0 for k ≠ 0",
                k=k,
                degree=sum(e),
                value=f.to_complex(omega),
                condition="birkhoff",
                stage=stage,
            )
        u[e] = c / omega
    return ResonantSplit(
        u=Jet._raw(v.n_dof, v.trunc, f, u), r=Jet._raw(v.n_dof, v.trunc, f, r)
    )


def solve_h_p(v: Jet, p: Jet, *, stage: str | None = None) -> ResonantSplit:
    """H_p u = v + r degree by degree, p = p₀ + O(ρ³) with p₀ diagonal."""
    p0 = p.degree_part(2)
    tail = p.degree_range(3, p.trunc)
    if any(sum(e) < 2 for e in p.terms):
        raise PreconditionError("p must vanish to second order at 0")
    N = v.trunc
    f = v.field
    u = Jet.zero(v.n_dof, N, f)
    r = Jet.zero(v.n_dof, N, f)
    lo = v.min_degree
    if lo is None:
        return ResonantSplit(u, r)
    for d in range(lo, N + 1):
        rhs = (v - poisson(tail, u, N)).degree_part(d)
        if rhs.is_zero(0.0):
            continue
        step = solve_h_p0(rhs, p0, stage=stage)
        u = u + step.u
        r = r + step.r
    return ResonantSplit(u, r)


def is_resonant(r: Jet, tol: float | None = None) -> bool:
    """Every monomial of r is x^α ξ^α."""
    return all(
        split(e)[0] == split(e)[1] or r.field.is_zero(c, tol) for e, c in r.terms.items()
    )

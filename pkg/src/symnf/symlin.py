"""
Symplectic linear algebra — symplecticity tests, paired spectral
decomposition, the real logarithm of a symplectic matrix, and the
quadratic form ↔ Hamilton matrix correspondence b(ρ) = ½σ(ρ, Bρ).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

import numpy as np
import scipy.linalg
import structlog

from .config import settings
from .errors import (
    FieldError,
    JetShapeError,
    NegativeEigenvalueError,
    PreconditionError,
    SpectralError,
)
from .fields import Field, GaussianRational, LatticeValue, get_field
from .jetcalc import Jet
from .jetcalc.matrices import (
    as_matrix,
    check_square_even,
    identity,
    inverse,
    is_zero,
    matrix_power,
    max_entry,
    rank,
    symplectic_form,
)
from .jetcalc.monomials import unit

logger = structlog.get_logger(__name__)

BlockKind = Literal["hyperbolic-real", "loxodromic", "elliptic", "unit"]


# ── Types ──


@dataclass(frozen=True)
class SymplecticCheck:
    is_symplectic: bool
    residual: float


@dataclass(frozen=True)
class EigenCluster:
    eigenvalue: complex
    mu: Any
    multiplicity: int
    basis: np.ndarray  # columns span the generalized eigenspace
    exact_eigenvalue: Any = None


@dataclass(frozen=True)
class SpectralBlock:
    kind: BlockKind
    representative: complex
    mu: Any
    clusters: tuple[EigenCluster, ...]
    jordan_ranks: tuple[int, ...] = ()

    @property
    def multiplicity(self) -> int:
        return sum(c.multiplicity for c in self.clusters)


@dataclass(frozen=True)
class SpectralData:
    blocks: tuple[SpectralBlock, ...]
    dim: int
    field: str
    cluster_rtol: float
    orthogonality_residual: float
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def clusters(self) -> list[EigenCluster]:
        return [c for b in self.blocks for c in b.clusters]

    def representative_mus(self) -> list[Any]:
        """Chosen logs, one per eigenvalue pair {λ, 1/λ}, repeated by multiplicity.

        A loxodromic orbit holds two such pairs, so it contributes μ and μ̄.
        """
        out: list[Any] = []
        for b in self.blocks:
            if b.kind == "unit":
                continue
            m = b.clusters[0].multiplicity
            out.extend([b.mu] * m)
            if b.kind == "loxodromic":
                out.extend([b.mu.conjugate()] * m)
        return out

    def all_mus(self) -> list[Any]:
        return [c.mu for c in self.clusters for _ in range(c.multiplicity)]


@dataclass(frozen=True)
class LogResult:
    """exp(B + 2π·lattice_part) = A; lattice_part is only set by exact logs."""

    B: np.ndarray
    spectral: SpectralData
    residuals: dict[str, float] = field(default_factory=dict)
    lattice_part: np.ndarray | None = None

    def total(self) -> np.ndarray:
        to_complex = np.vectorize(complex, otypes=[complex])
        if self.lattice_part is None:
            return to_complex(self.B)
        return to_complex(self.B) + 2 * math.pi * to_complex(self.lattice_part)


@dataclass(frozen=True)
class ExactCluster:
    """User-supplied exact spectral data for one eigenvalue."""

    eigenvalue: GaussianRational
    mu: GaussianRational | LatticeValue
    basis: Sequence[Sequence[Any]]  # list of column vectors


# ── Symplecticity ──


def check_symplectic(
    m: Any, field: Field | None = None, tol: float | None = None
) -> SymplecticCheck:
    """MᵀJM − J, exactly or against a tolerance."""
    f = field or get_field(settings.field, settings.tol)
    M = as_matrix(m, f)
    n = check_square_even(M)
    J = symplectic_form(n, f)
    diff = M.T @ J @ M - J
    if f.exact:
        residual = math.sqrt(sum(abs(complex(v)) ** 2 for v in diff.flat))
    else:
        residual = float(np.linalg.norm(diff))
    ok = is_zero(diff, f) if f.exact else residual <= (f.tol if tol is None else tol)
    return SymplecticCheck(is_symplectic=bool(ok), residual=residual)


# ── Quadratic forms ──


def quadratic_form(B: Any, trunc: int = 2, field: Field | None = None) -> Jet:
    """b(ρ) = ½σ(ρ, Bρ) = ½ ρᵀ(JᵀB)ρ; requires JᵀB symmetric."""
    f = field or get_field(settings.field, settings.tol)
    Bm = as_matrix(B, f)
    n = check_square_even(Bm)
    J = symplectic_form(n, f)
    S = J.T @ Bm
    asym = S - S.T
    if f.exact:
        symmetric = is_zero(asym, f)
    else:
        symmetric = max_entry(asym) <= max(f.tol, 1e-12) * max(1.0, max_entry(S))
    if not symmetric:
        raise PreconditionError(
            "B is not a Hamiltonian matrix (JB not symmetric)", residual=max_entry(asym)
        )
    dim = 2 * n
    half = f.coerce(1) / 2
    terms: dict[tuple[int, ...], Any] = {}
    for i in range(dim):
        for k in range(i, dim):
            c = S[i, k] * half if i == k else (S[i, k] + S[k, i]) * half
            if c != 0:
                e = list(unit(dim, i))
                e[k] += 1
                terms[tuple(e)] = c
    return Jet(n, trunc, terms, f)


def hamilton_matrix(b: Jet) -> np.ndarray:
    """B with H_b(ρ) = Bρ, i.e. B = J · Hess(b)."""
    if any(sum(e) != 2 for e in b.terms):
        raise PreconditionError("b must be a homogeneous quadratic form")
    f = b.field
    dim = b.nvars
    hess = [[f.zero] * dim for _ in range(dim)]
    for e, c in b.terms.items():
        idx = [i for i, p in enumerate(e) for _ in range(p)]
        i, k = idx
        if i == k:
            hess[i][i] = hess[i][i] + 2 * c
        else:
            hess[i][k] = hess[i][k] + c
            hess[k][i] = hess[k][i] + c
    return symplectic_form(b.n_dof, f) @ as_matrix(hess, f)


# ── Spectral pairing ──


def _check_negative(lam: complex, tol: float) -> None:
    if lam.real < 0 and abs(lam.imag) <= tol * max(1.0, abs(lam)):
        raise NegativeEigenvalueError(
            "negative real eigenvalue: the real logarithm is excluded",
            eigenvalue=[lam.real, lam.imag],
        )


def _cluster(eigs: np.ndarray, rtol: float) -> list[list[complex]]:
    # Jordan blocks at 1 split their eigenvalues by ~eps^(1/k); keep them together
    unit_members = [complex(z) for z in eigs if abs(z - 1.0) <= 1e-6]
    clusters: list[list[complex]] = [unit_members] if unit_members else []
    rest = [z for z in eigs if abs(z - 1.0) > 1e-6]
    for lam in sorted(rest, key=lambda z: (round(z.real, 6), round(z.imag, 6))):
        for c in clusters:
            center = sum(c) / len(c)
            if abs(lam - center) <= rtol * max(1.0, abs(center)):
                c.append(complex(lam))
                break
        else:
            clusters.append([complex(lam)])
    return clusters


def _null_basis(A: np.ndarray, lam: complex, m: int) -> np.ndarray:
    dim = A.shape[0]
    K = np.linalg.matrix_power(A - lam * np.eye(dim), m)
    _, _, vh = np.linalg.svd(K)
    return vh[dim - m :].conj().T


def _numerical_geometric_multiplicity(A: np.ndarray, lam: complex) -> int:
    s = np.linalg.svd(A - lam * np.eye(A.shape[0]), compute_uv=False)
    thresh = 1e-6 * max(1.0, float(s[0]))
    return int(np.sum(s <= thresh))


def _is_representative(lam: complex, tol: float) -> bool:
    if abs(abs(lam) - 1.0) > tol:
        return abs(lam) > 1.0
    return lam.imag > tol


def _block_kind(lam: complex, tol: float) -> BlockKind:
    unit_circle = abs(abs(lam) - 1.0) <= tol
    real = abs(lam.imag) <= tol
    if unit_circle and real:
        return "unit"
    if real:
        return "hyperbolic-real"
    if unit_circle:
        return "elliptic"
    return "loxodromic"


def _orthogonality_residual(clusters: Sequence[EigenCluster], J: np.ndarray, tol: float) -> float:
    worst = 0.0
    for i, a in enumerate(clusters):
        for b in clusters[i:]:
            if abs(a.eigenvalue * b.eigenvalue - 1.0) <= tol:
                continue
            pairing = a.basis.T @ J.T @ b.basis
            worst = max(worst, float(np.max(np.abs(pairing), initial=0.0)))
    return worst


def spectral_pairing(
    A: Any,
    *,
    field: Field | None = None,
    cluster_rtol: float | None = None,
    windings: Mapping[int, int] | None = None,
    exact_spectrum: Sequence[ExactCluster] | None = None,
) -> SpectralData:
    """Group eigenvalues into {λ, 1/λ, λ̄, 1/λ̄} orbits and choose logarithms."""
    f = field or get_field(settings.field, settings.tol)
    Am = as_matrix(A, f)
    n = check_square_even(Am)
    if f.exact:
        return _exact_spectral_pairing(Am, f, exact_spectrum)
    rtol = settings.cluster_rtol if cluster_rtol is None else cluster_rtol
    tol = max(f.tol, rtol) * 10
    windings = dict(windings or {})
    eigs = scipy.linalg.eigvals(Am)
    for lam in eigs:
        _check_negative(complex(lam), tol)
    raw = _cluster(eigs, rtol)

    clusters: list[tuple[complex, int, np.ndarray, tuple[int, ...]]] = []
    for members in raw:
        lam = sum(members) / len(members)
        if abs(lam - 1.0) <= 1e-6:
            lam = 1 + 0j
        m = len(members)
        basis = _null_basis(Am, lam, m)
        ranks: tuple[int, ...] = ()
        if _block_kind(lam, tol) == "unit":
            shifted = Am - np.eye(2 * n)
            ranks = tuple(
                rank(np.linalg.matrix_power(shifted, k), f, 1e-7) for k in range(1, m + 1)
            )
        elif m > 1 and _numerical_geometric_multiplicity(Am, lam) != 1:
            raise SpectralError(
                "repeated eigenvalue is not a single Jordan block",
                eigenvalue=[lam.real, lam.imag],
                multiplicity=m,
            )
        clusters.append((lam, m, basis, ranks))

    def find(target: complex) -> int:
        dists = [abs(c[0] - target) for c in clusters]
        idx = int(np.argmin(dists))
        if dists[idx] > tol * max(1.0, abs(target)) * 1e3:
            raise SpectralError(
                "eigenvalue set is not closed under λ → 1/λ, λ → λ̄",
                eigenvalue=[target.real, target.imag],
            )
        return idx

    blocks: list[SpectralBlock] = []
    used: set[int] = set()
    order = sorted(range(len(clusters)), key=lambda i: (-abs(clusters[i][0]), -clusters[i][0].imag))
    for i in order:
        lam, m, basis, ranks = clusters[i]
        if i in used:
            continue
        kind = _block_kind(lam, tol)
        if kind == "unit":
            used.add(i)
            blocks.append(
                SpectralBlock("unit", 1 + 0j, 0j, (EigenCluster(1 + 0j, 0j, m, basis),), ranks)
            )
            continue
        if not _is_representative(lam, tol):
            continue
        k = windings.get(len(blocks), 0)
        if k and kind == "hyperbolic-real":
            raise PreconditionError("a real hyperbolic block admits only the principal log")
        mu = cmath.log(lam) + 2j * math.pi * k
        partners: list[tuple[complex, complex]] = [(lam, mu), (1 / lam, -mu)]
        if kind == "loxodromic":
            partners += [(lam.conjugate(), mu.conjugate()), (1 / lam.conjugate(), -mu.conjugate())]
        members = []
        for target, mu_t in partners:
            j = find(target)
            used.add(j)
            lj, mj, bj, _ = clusters[j]
            if mj != m:
                raise SpectralError("paired eigenvalues have different multiplicities",
                                    eigenvalue=[lam.real, lam.imag])
            members.append(EigenCluster(lj, mu_t, mj, bj))
        blocks.append(SpectralBlock(kind, lam, mu, tuple(members)))

    flat = [c for b in blocks for c in b.clusters]
    residual = _orthogonality_residual(flat, symplectic_form(n, f), tol)
    if residual > settings.orthogonality_tol:
        logger.warning("eigenspaces_not_orthogonal", residual=residual)
    return SpectralData(
        blocks=tuple(blocks),
        dim=2 * n,
        field=f.name,
        cluster_rtol=rtol,
        orthogonality_residual=residual,
        metadata={"cluster_rule": f"relative gap < {rtol:g}", "unit_basis": "svd-null-space"},
    )


def _exact_spectral_pairing(
    A: np.ndarray, f: Field, spectrum: Sequence[ExactCluster] | None
) -> SpectralData:
    dim = A.shape[0]
    ident = identity(dim, f)
    N = A - ident
    if is_zero(matrix_power(N, dim, f), f):
        ranks = tuple(rank(matrix_power(N, k, f), f) for k in range(1, dim + 1))
        basis = ident
        cluster = EigenCluster(1 + 0j, f.zero, dim, basis, f.one)
        block = SpectralBlock("unit", 1 + 0j, f.zero, (cluster,), ranks)
        return SpectralData((block,), dim, f.name, 0.0, 0.0, {"unit_basis": "standard"})
    if not spectrum:
        raise FieldError(
            "exact logarithm of a non-unipotent matrix needs user-supplied spectral data"
        )
    return verify_exact_spectrum(A, spectrum, f)


def _exact_kind(lam: GaussianRational) -> BlockKind:
    norm2 = lam.re * lam.re + lam.im * lam.im
    if lam == 1:
        return "unit"
    if not lam.im:
        return "hyperbolic-real"
    return "elliptic" if norm2 == 1 else "loxodromic"


def _exact_is_representative(lam: GaussianRational) -> bool:
    norm2 = lam.re * lam.re + lam.im * lam.im
    return norm2 > 1 or (norm2 == 1 and lam.im > 0)


def _exact_mu(mu: Any, f: Field) -> GaussianRational | LatticeValue:
    if isinstance(mu, LatticeValue):
        return f.coerce(mu.a) if not mu.q else LatticeValue(f.coerce(mu.a), mu.q)
    return f.coerce(mu)


def _conj_mu(mu: Any, f: Field) -> Any:
    return mu.conjugate() if isinstance(mu, LatticeValue) else f.conj(mu)


def _lattice_split(mu: Any, f: Field) -> tuple[Any, Any]:
    """μ = a + 2π·(iq): returns (a, iq)."""
    if isinstance(mu, LatticeValue):
        return mu.a, f.coerce(GaussianRational(Fraction(0), mu.q))
    return mu, f.zero


def verify_exact_spectrum(
    A: np.ndarray, spectrum: Sequence[ExactCluster], f: Field
) -> SpectralData:
    """Check user-supplied exact spectral data against A and the pairing rules.

    Block structure, nilpotency and the branch rules μ(1/λ) = −μ(λ),
    μ(λ̄) = conj μ(λ) are verified exactly; exp(μ) = λ in floating point.
    """
    dim = A.shape[0]
    cols = [[f.coerce(v) for v in col] for c in spectrum for col in c.basis]
    if len(cols) != dim or any(len(col) != dim for col in cols):
        raise JetShapeError("spectral basis does not span the phase space", vectors=len(cols))
    V = as_matrix([[cols[j][i] for j in range(dim)] for i in range(dim)], f)
    T = inverse(V, f) @ A @ V
    offset = 0
    clusters: list[EigenCluster] = []
    for c in spectrum:
        m = len(c.basis)
        lam = f.coerce(c.eigenvalue)
        mu = _exact_mu(c.mu, f)
        lam_c = complex(lam)
        _check_negative(lam_c, 0.0)
        outside = [i for i in range(dim) if i < offset or i >= offset + m]
        if any(T[i, j] != 0 for i in outside for j in range(offset, offset + m)):
            raise PreconditionError("spectral basis is not A-invariant", eigenvalue=str(lam))
        block = T[offset : offset + m, offset : offset + m] - identity(m, f) * lam
        if not is_zero(matrix_power(block, m, f), f):
            raise PreconditionError(
                "basis does not span a generalized eigenspace", eigenvalue=str(lam)
            )
        if abs(cmath.exp(complex(mu)) - lam_c) > 1e-9 * max(1.0, abs(lam_c)):
            raise PreconditionError("exp(μ) does not match λ", eigenvalue=str(lam), mu=str(mu))
        clusters.append(EigenCluster(lam_c, mu, m, V[:, offset : offset + m], lam))
        offset += m

    def partner(target: GaussianRational) -> EigenCluster | None:
        return next((d for d in clusters if d.exact_eigenvalue == target), None)

    for c in clusters:
        lam = c.exact_eigenvalue
        inv = partner(f.one / lam)
        if inv is None or inv.mu != -c.mu:
            raise PreconditionError(
                "log branches violate μ(1/λ) = −μ(λ)", eigenvalue=str(lam)
            )
        conj = partner(f.conj(lam))
        if conj is None or conj.mu != _conj_mu(c.mu, f):
            raise PreconditionError(
                "log branches violate μ(λ̄) = conj μ(λ)", eigenvalue=str(lam)
            )

    blocks: list[SpectralBlock] = []
    for c in clusters:
        lam = c.exact_eigenvalue
        kind = _exact_kind(lam)
        if kind != "unit" and not _exact_is_representative(lam):
            continue
        orbit = {lam, f.one / lam, f.conj(lam), f.one / f.conj(lam)}
        members = tuple(d for d in clusters if d.exact_eigenvalue in orbit)
        blocks.append(SpectralBlock(kind, c.eigenvalue, c.mu, members))
    return SpectralData(tuple(blocks), dim, f.name, 0.0, 0.0, {"spectrum": "user-supplied"})


# ── Logarithm ──


def _log_unipotent_series(N: np.ndarray, m: int, f: Field) -> np.ndarray:
    """log(1 + N) = Σ_{j≥1} (−1)^{j+1} N^j / j, N nilpotent of order ≤ m."""
    out = identity(N.shape[0], f) * f.zero
    power = identity(N.shape[0], f)
    for j in range(1, m + 1):
        power = power @ N
        if f.exact and is_zero(power, f):
            break
        out = out + power * (f.coerce((-1) ** (j + 1)) / j)
    return out


def _require_symplectic(Am: np.ndarray, f: Field) -> SymplecticCheck:
    scale = 1.0 if f.exact else max(1.0, float(np.linalg.norm(Am.astype(complex)))) ** 2
    check = check_symplectic(Am, f, f.tol * scale)
    if not check.is_symplectic:
        raise PreconditionError("matrix is not symplectic", residual=check.residual)
    return check


def symplectic_log(
    A: Any,
    branch: str = "principal",
    *,
    field: Field | None = None,
    cluster_rtol: float | None = None,
    windings: Mapping[int, int] | None = None,
    exact_spectrum: Sequence[ExactCluster] | None = None,
) -> LogResult:
    """Real B with exp B = A and JB symmetric."""
    if branch != "principal":
        raise PreconditionError("unknown branch rule", branch=branch)
    f = field or get_field(settings.field, settings.tol)
    Am = as_matrix(A, f)
    n = check_square_even(Am)
    check = _require_symplectic(Am, f)
    J = symplectic_form(n, f)
    spectral = spectral_pairing(
        Am, field=f, cluster_rtol=cluster_rtol, windings=windings, exact_spectrum=exact_spectrum
    )
    dim = 2 * n

    if f.exact:
        unipotent = len(spectral.blocks) == 1 and spectral.blocks[0].kind == "unit"
        if unipotent and exact_spectrum is None:
            B = _log_unipotent_series(Am - identity(dim, f), dim, f)
            lattice = identity(dim, f) * f.zero
        else:
            V = as_matrix(np.hstack([c.basis for c in spectral.clusters]).tolist(), f)
            V_inv = inverse(V, f)
            T = V_inv @ Am @ V
            L = identity(dim, f) * f.zero
            Lq = identity(dim, f) * f.zero
            offset = 0
            for c in spectral.clusters:
                m = c.multiplicity
                sl = slice(offset, offset + m)
                lam = c.exact_eigenvalue if c.exact_eigenvalue is not None else f.one
                Nc = T[sl, sl] * (f.one / lam) - identity(m, f)
                a, iq = _lattice_split(c.mu, f)
                L[sl, sl] = identity(m, f) * a + _log_unipotent_series(Nc, m, f)
                Lq[sl, sl] = identity(m, f) * iq
                offset += m
            B = V @ L @ V_inv
            lattice = V @ Lq @ V_inv
        # π is transcendental: each part is real and Hamiltonian on its own
        for part in (B, lattice):
            S = J.T @ part
            if not is_zero(S - S.T, f):
                raise PreconditionError(
                    "exact logarithm is not Hamiltonian; check the spectral data"
                )
            if any(not f.is_real(v) for v in part.flat):
                raise PreconditionError("exact logarithm is not real; check the log branches")
        residuals = {"symplectic": check.residual, "hamiltonian": 0.0, "projection": 0.0}
        return LogResult(
            B=B,
            spectral=spectral,
            residuals=residuals,
            lattice_part=None if is_zero(lattice, f) else lattice,
        )

    V = np.hstack([c.basis for c in spectral.clusters])
    V_inv = np.linalg.inv(V)
    T = V_inv @ Am @ V
    L = np.zeros((dim, dim), dtype=complex)
    offset = 0
    for c in spectral.clusters:
        m = c.multiplicity
        sl = slice(offset, offset + m)
        Nc = T[sl, sl] * np.exp(-c.mu) - np.eye(m)
        L[sl, sl] = c.mu * np.eye(m) + _log_unipotent_series(Nc, m, f)
        offset += m
    Bc = V @ L @ V_inv
    imag = float(np.max(np.abs(Bc.imag), initial=0.0))
    B = Bc.real
    Jr = J.real
    S = Jr.T @ B
    projection = float(np.linalg.norm(S - S.T))
    S = 0.5 * (S + S.T)
    B = Jr @ S
    exp_residual = float(np.linalg.norm(scipy.linalg.expm(B) - Am.real))
    residuals = {
        "symplectic": check.residual,
        "imaginary": imag,
        "projection": projection,
        "hamiltonian": float(np.linalg.norm(Jr @ B - (Jr @ B).T)),
        "exp": exp_residual,
    }
    logger.debug("symplectic_log", **residuals)
    return LogResult(B=B.astype(complex), spectral=spectral, residuals=residuals)


def expm(B: np.ndarray, field: Field | None = None) -> np.ndarray:
    """exp(B); exact only for nilpotent B."""
    f = field or get_field(settings.field, settings.tol)
    if not f.exact:
        return scipy.linalg.expm(np.asarray(B, dtype=complex))
    dim = B.shape[0]
    out = identity(dim, f)
    term = identity(dim, f)
    for k in range(1, dim + 1):
        term = term @ B * (f.one / k)
        if is_zero(term, f):
            return out
        out = out + term
    if not is_zero(term @ B, f):
        raise FieldError("exp of a non-nilpotent exact matrix is not exact")
    return out

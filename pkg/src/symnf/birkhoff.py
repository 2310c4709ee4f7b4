"""
Classical Birkhoff normal form.

The quadratic part is brought to the real block form

    Σ_{j<n_hc} [α_j(x_jξ_j + x_kξ_k) − β_j(x_jξ_k − x_kξ_j)]   (k = n_hc + j)
  + Σ μ_j x_jξ_j  + Σ ν_j (x_j² + ξ_j²)/2

(loxodromic pairs first, then hyperbolic, then elliptic degrees of freedom).
The nonlinear reduction runs in complex coordinates where the quadratic
part is diagonal, Σ λ_j z_jζ_j, with a Gaussian-rational change of
variables, so exact inputs stay exact.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import scipy.linalg
import structlog

from .config import settings
from .errors import PreconditionError
from .fields import Field, get_field
from .homology import solve_h_p
from .jetcalc import Jet, MapJet, compose, flow_jet, linear_pullback, poisson, substitute
from .jetcalc.matrices import as_matrix, identity, symplectic_form, symplectic_inverse
from .jetcalc.monomials import Exponent, graded_key, split
from .symlin import LogResult, check_symplectic, hamilton_matrix, quadratic_form

logger = structlog.get_logger(__name__)


# ── Quadratic normal form ──


@dataclass(frozen=True)
class QuadraticNormalForm:
    n_hc: int
    n_hr: int
    n_e: int
    alphas: tuple[Any, ...] = ()
    betas: tuple[Any, ...] = ()
    mus: tuple[Any, ...] = ()
    nus: tuple[Any, ...] = ()
    kappa0: np.ndarray | None = None
    residual: float = 0.0
    field: str = "float"

    @property
    def n_dof(self) -> int:
        return 2 * self.n_hc + self.n_hr + self.n_e

    def _field(self) -> Field:
        return get_field(self.field, settings.tol)

    def _offsets(self) -> tuple[int, int]:
        return 2 * self.n_hc, 2 * self.n_hc + self.n_hr

    def quadratic_part(self, trunc: int = 2) -> Jet:
        f = self._field()
        n = self.n_dof
        x = [Jet.x(i, n, trunc, f) for i in range(n)]
        xi = [Jet.xi(i, n, trunc, f) for i in range(n)]
        out = Jet.zero(n, trunc, f)
        for j in range(self.n_hc):
            a, b = j, self.n_hc + j
            out = out + (x[a] * xi[a] + x[b] * xi[b]).scale(self.alphas[j])
            out = out - (x[a] * xi[b] - x[b] * xi[a]).scale(self.betas[j])
        h0, e0 = self._offsets()
        for j, mu in enumerate(self.mus):
            out = out + (x[h0 + j] * xi[h0 + j]).scale(mu)
        for j, nu in enumerate(self.nus):
            k = e0 + j
            out = out + (x[k] * x[k] + xi[k] * xi[k]).scale(f.coerce(nu) / 2)
        return out

    def actions(self, trunc: int = 2) -> list[Jet]:
        """Resonant actions ι_1..ι_n, indexed like the degrees of freedom."""
        f = self._field()
        n = self.n_dof
        x = [Jet.x(i, n, trunc, f) for i in range(n)]
        xi = [Jet.xi(i, n, trunc, f) for i in range(n)]
        out: list[Jet] = [Jet.zero(n, trunc, f)] * n
        for j in range(self.n_hc):
            a, b = j, self.n_hc + j
            out[a] = x[a] * xi[a] + x[b] * xi[b]
            out[b] = x[a] * xi[b] - x[b] * xi[a]
        h0, e0 = self._offsets()
        for j in range(self.n_hr):
            out[h0 + j] = x[h0 + j] * xi[h0 + j]
        for j in range(self.n_e):
            k = e0 + j
            out[k] = (x[k] * x[k] + xi[k] * xi[k]).scale(f.one / 2)
        return out

    def leading_coefficients(self) -> list[Any]:
        """Linear part of F₀ in the action variables: (α, −β, μ, ν)."""
        return [*self.alphas, *(-b for b in self.betas), *self.mus, *self.nus]

    def diagonal_mus(self) -> list[Any]:
        """Coefficients λ_j of z_jζ_j in the complexified coordinates."""
        f = self._field()
        out: list[Any] = [f.zero] * self.n_dof
        for j in range(self.n_hc):
            a = f.coerce(self.alphas[j])
            b = f.coerce(self.betas[j])
            out[j] = a + f.i * b
            out[self.n_hc + j] = a - f.i * b
        h0, e0 = self._offsets()
        for j, mu in enumerate(self.mus):
            out[h0 + j] = f.coerce(mu)
        for j, nu in enumerate(self.nus):
            out[e0 + j] = f.i * f.coerce(nu)
        return out

    def diagonal_part(self, trunc: int = 2) -> Jet:
        """Σ λ_j z_jζ_j, the quadratic part in the complexified coordinates."""
        f = self._field()
        n = self.n_dof
        out = Jet.zero(n, trunc, f)
        for j, lam in enumerate(self.diagonal_mus()):
            out = out + (Jet.x(j, n, trunc, f) * Jet.xi(j, n, trunc, f)).scale(lam)
        return out

    def complexifier(self) -> np.ndarray:
        """C with ρ = C·(z, ζ) and (p₀∘C)(z, ζ) = Σ λ_j z_jζ_j; C is symplectic."""
        f = self._field()
        n = self.n_dof
        half = f.one / 2
        i = f.i
        C = [[f.zero] * (2 * n) for _ in range(2 * n)]
        for j in range(self.n_hc):
            a, b = j, self.n_hc + j
            C[a][a], C[a][b] = f.one, f.one
            C[b][a], C[b][b] = i, -i
            C[n + a][n + a], C[n + a][n + b] = half, half
            C[n + b][n + a], C[n + b][n + b] = -i * half, i * half
        h0, e0 = self._offsets()
        for j in range(self.n_hr):
            k = h0 + j
            C[k][k], C[n + k][n + k] = f.one, f.one
        for j in range(self.n_e):
            k = e0 + j
            C[k][k], C[k][n + k] = f.one, i * half
            C[n + k][k], C[n + k][n + k] = i, half
        return as_matrix(C, f)

    def action_images(self) -> list[dict[Exponent, Any]]:
        """z_jζ_j written as linear polynomials in the actions."""
        f = self._field()
        n = self.n_dof
        half = f.one / 2

        def lin(*pairs: tuple[int, Any]) -> dict[Exponent, Any]:
            out: dict[Exponent, Any] = {}
            for k, c in pairs:
                e = [0] * n
                e[k] = 1
                out[tuple(e)] = c
            return out

        images: list[dict[Exponent, Any]] = [{}] * n
        for j in range(self.n_hc):
            a, b = j, self.n_hc + j
            images[a] = lin((a, half), (b, f.i * half))
            images[b] = lin((a, half), (b, -f.i * half))
        h0, e0 = self._offsets()
        for j in range(self.n_hr):
            images[h0 + j] = lin((h0 + j, f.one))
        for j in range(self.n_e):
            images[e0 + j] = lin((e0 + j, -f.i))
        return images

    @classmethod
    def from_quadratic(cls, p2: Jet) -> QuadraticNormalForm:
        """Read the block parameters off a quadratic part already in block form."""
        f = p2.field
        n = p2.n_dof
        terms = {e: c for e, c in p2.terms.items() if sum(e) == 2}
        if len(terms) != len(p2.terms):
            raise PreconditionError("quadratic part expected")

        def c(i: int, k: int) -> Any:
            e = [0] * (2 * n)
            e[i] += 1
            e[k] += 1
            return terms.get(tuple(e), f.zero)

        def is_coupled(j: int) -> bool:
            return any(
                not (f.is_zero(c(j, n + k)) and f.is_zero(c(k, n + j))) for k in range(n) if k != j
            )

        coupled = [j for j in range(n) if is_coupled(j)]
        n_hc = len(coupled) // 2
        if coupled != list(range(2 * n_hc)):
            raise PreconditionError("quadratic part is not in block form")
        alphas, betas = [], []
        for j in range(n_hc):
            a, b = j, n_hc + j
            alphas.append(c(a, n + a))
            betas.append(c(b, n + a))
        kinds = []
        for j in range(2 * n_hc, n):
            if not (f.is_zero(c(j, j)) and f.is_zero(c(n + j, n + j))):
                kinds.append(("e", c(j, j) * 2))
            else:
                kinds.append(("h", c(j, n + j)))
        mus = [v for k, v in kinds if k == "h"]
        nus = [v for k, v in kinds if k == "e"]
        if [k for k, _ in kinds] != ["h"] * len(mus) + ["e"] * len(nus):
            raise PreconditionError("hyperbolic degrees of freedom must precede elliptic ones")
        qnf = cls(
            n_hc=n_hc,
            n_hr=len(mus),
            n_e=len(nus),
            alphas=tuple(alphas),
            betas=tuple(betas),
            mus=tuple(mus),
            nus=tuple(nus),
            kappa0=identity(2 * n, f),
            field=f.name,
        )
        if not (qnf.quadratic_part(p2.trunc) - p2).is_zero():
            raise PreconditionError("quadratic part is not in block form")
        qnf.validate()
        return qnf

    def validate(self) -> None:
        """Distinctness requirements of the block form."""

        def distinct(values: Iterable[complex]) -> bool:
            vals = list(values)
            return all(
                abs(a - b) > settings.tol * max(1.0, abs(a))
                for i, a in enumerate(vals)
                for b in vals[i + 1 :]
            )

        mus = [complex(m) for m in self.mus]
        if any(m.real <= 0 for m in mus) or not distinct(mus):
            raise PreconditionError("hyperbolic exponents must be positive and distinct")
        lox = [complex(a) + 1j * complex(b) for a, b in zip(self.alphas, self.betas, strict=True)]
        if any(z.real <= 0 or z.imag <= 0 for z in lox) or not distinct(lox):
            raise PreconditionError("loxodromic α, β must be positive with distinct α + iβ")
        nus = [complex(v) for v in self.nus]
        if any(abs(v) == 0 for v in nus) or not distinct(abs(v) for v in nus):
            raise PreconditionError("elliptic frequencies must be nonzero with distinct |ν|")


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    idx = next(i for i, c in enumerate(v) if abs(c) > 1e-12)
    return v * (abs(v[idx]) / v[idx])


def quadratic_normalize(B: LogResult | np.ndarray | Sequence[Sequence[Any]]) -> QuadraticNormalForm:
    """Real symplectic κ₀ taking b = ½σ(ρ, Bρ) to block form (float field)."""
    mat = B.B if isinstance(B, LogResult) else B
    Bm = np.real(np.asarray(as_matrix(mat, get_field("float")), dtype=complex))
    dim = Bm.shape[0]
    n = dim // 2
    J = symplectic_form(n, get_field("float")).real
    tol = max(settings.tol, 1e-9) * max(1.0, float(np.max(np.abs(Bm))))

    def sigma(u: np.ndarray, v: np.ndarray) -> complex:
        return complex(u @ J.T @ v)

    eigs, vecs = scipy.linalg.eig(Bm)
    if any(abs(d) <= tol for d in eigs):
        raise PreconditionError("zero eigenvalue in the quadratic part")
    for i, a in enumerate(eigs):
        for b in eigs[i + 1 :]:
            if abs(a - b) <= tol * 1e3:
                raise PreconditionError("repeated eigenvalue in the quadratic part")

    def partner(target: complex) -> np.ndarray:
        return vecs[:, int(np.argmin(np.abs(eigs - target)))]

    lox, hyp, ell = [], [], []
    for k, d in enumerate(eigs):
        v = vecs[:, k]
        if abs(d.imag) <= tol:
            if d.real > 0:
                e = _normalize_phase(v)
                e = e / np.linalg.norm(e)
                f = partner(-d)
                f = f / sigma(f, e)
                hyp.append((d.real, e.real, f.real))
        elif abs(d.real) <= tol:
            if d.imag > 0:
                e = v
                s = sigma(e, e.conj()) / 1j
                nu = d.imag
                if s.real < 0:
                    e, nu, s = e.conj(), -nu, -s
                e = _normalize_phase(e) / math.sqrt(abs(s.real) / 2)
                ell.append((nu, e.real, e.imag))
        elif d.real > 0 and d.imag > 0:
            e = _normalize_phase(v)
            e = e / np.linalg.norm(e)
            f = partner(-d)
            f = f / sigma(f, e)
            lox.append((d.real, d.imag, e, f))

    lox.sort(key=lambda t: (t[0], t[1]))
    hyp.sort(key=lambda t: t[0])
    ell.sort(key=lambda t: abs(t[0]))
    n_hc = len(lox)
    cols_x: list[np.ndarray] = [np.zeros(dim)] * n
    cols_xi: list[np.ndarray] = [np.zeros(dim)] * n
    for j, (_, _, e, f) in enumerate(lox):
        a, b = j, n_hc + j
        cols_x[a], cols_x[b] = e.real, e.imag
        cols_xi[a], cols_xi[b] = 2 * f.real, -2 * f.imag
    h0 = 2 * n_hc
    for j, (_, e, f) in enumerate(hyp):
        cols_x[h0 + j], cols_xi[h0 + j] = e, f
    e0 = h0 + len(hyp)
    for j, (_, cx, cxi) in enumerate(ell):
        cols_x[e0 + j], cols_xi[e0 + j] = cx, cxi
    if 2 * n_hc + len(hyp) + len(ell) != n:
        raise PreconditionError("spectrum of the quadratic part is not of block type")
    kappa0 = np.column_stack(cols_x + cols_xi)

    fl = get_field("float", settings.tol)
    check = check_symplectic(kappa0, fl, tol=1e-8)
    qnf = QuadraticNormalForm(
        n_hc=n_hc,
        n_hr=len(hyp),
        n_e=len(ell),
        alphas=tuple(t[0] for t in lox),
        betas=tuple(t[1] for t in lox),
        mus=tuple(t[0] for t in hyp),
        nus=tuple(t[0] for t in ell),
        kappa0=kappa0,
        field="float",
    )
    b = quadratic_form(Bm, 2, fl)
    form_residual = (compose(b, MapJet.linear(kappa0, 2, fl)) - qnf.quadratic_part(2)).max_abs()
    residual = max(check.residual, form_residual)
    if residual > 1e-6:
        raise PreconditionError("quadratic normalization failed to verify", residual=residual)
    qnf.validate()
    logger.debug("quadratic_normalize", n_hc=n_hc, n_hr=len(hyp), n_e=len(ell), residual=residual)
    return replace(qnf, residual=residual)


# ── Nonlinear reduction ──


@dataclass(frozen=True)
class BirkhoffResult:
    kappa: MapJet
    r: Jet
    p0: Jet
    qnf: QuadraticNormalForm
    generators: tuple[Jet, ...] = ()
    identity_residual: float = 0.0
    resonance_residual: float = 0.0
    imaginary_residual: float = 0.0


def _realify(jet: Jet, real_input: bool) -> tuple[Jet, float]:
    """Real part for real input (float field), with the discarded imaginary size."""
    if not real_input:
        return jet, 0.0
    imag = jet.imag_part().max_abs()
    return (jet if jet.field.exact else jet.real_part()), imag


def birkhoff_reduce(
    p: Jet, trunc: int | None = None, qnf: QuadraticNormalForm | None = None
) -> BirkhoffResult:
    """κ = exp H_{q₃} ∘ exp H_{q₄} ∘ … with p∘κ = p₀ + r, r resonant, up to N."""
    N = p.trunc if trunc is None else trunc
    p = p.truncate(N)
    f = p.field
    n = p.n_dof
    if any(sum(e) < 2 for e in p.terms):
        raise PreconditionError("p must vanish to second order at 0")
    q = qnf or QuadraticNormalForm.from_quadratic(p.degree_part(2))
    p0 = q.quadratic_part(N)
    if not (p.degree_part(2) - p0).is_zero():
        raise PreconditionError("quadratic part does not match the normal form")

    C = q.complexifier()
    C_map = MapJet.linear(C, N, f)
    C_inv_map = MapJet.linear(symplectic_inverse(C, f), N, f)
    pc0 = q.diagonal_part(N)
    current = pc0 + compose(p.degree_range(3, N), C_map)

    K = MapJet.identity(n, N, f)
    gens: list[Jet] = []
    for d in range(3, N + 1):
        v = current.degree_part(d)
        if v.is_zero(0.0):
            continue
        g = solve_h_p(v, current, stage="birkhoff").u.degree_part(d)
        if g.is_zero(0.0):
            continue
        flow = flow_jet(g, 1, N)
        current = compose(current, flow)
        K = K.compose(flow)
        gens.append(g)
        logger.debug("birkhoff_degree", degree=d, generator=g.max_abs())

    r_c = current - pc0
    kappa_c = C_map.compose(K).compose(C_inv_map)
    real_input = p.is_real()
    r, im_r = _realify(compose(r_c, C_inv_map), real_input)
    comps = [_realify(c, real_input) for c in kappa_c.components]
    kappa = MapJet([c for c, _ in comps], N)
    generators = tuple(_realify(compose(g, C_inv_map), real_input)[0] for g in gens)
    imaginary = max([im_r, *(im for _, im in comps)])
    if imaginary > max(f.tol, 1e-8):
        logger.warning("birkhoff_not_real", imaginary=imaginary)

    identity_residual = (compose(p, kappa) - (p0 + r)).max_abs()
    resonance_residual = poisson(p0, r, N).max_abs()
    logger.info(
        "birkhoff_done", trunc=N, identity=identity_residual, resonance=resonance_residual
    )
    return BirkhoffResult(
        kappa=kappa,
        r=r,
        p0=p0,
        qnf=q,
        generators=generators,
        identity_residual=identity_residual,
        resonance_residual=resonance_residual,
        imaginary_residual=imaginary,
    )


# ── Action variables ──


@dataclass(frozen=True)
class ActionPolynomial:
    """Polynomial in the actions ι_1..ι_n."""

    n_dof: int
    field: Field
    coeffs: dict[Exponent, Any] = field(default_factory=dict)

    def items(self) -> list[tuple[Exponent, Any]]:
        return sorted(self.coeffs.items(), key=lambda kv: graded_key(kv[0]))

    def coeff(self, exp: Sequence[int]) -> Any:
        return self.coeffs.get(tuple(exp), self.field.zero)

    def linear_coefficients(self) -> list[Any]:
        out = []
        for j in range(self.n_dof):
            e = [0] * self.n_dof
            e[j] = 1
            out.append(self.coeff(e))
        return out

    def real_part(self) -> ActionPolynomial:
        f = self.field
        coeffs = {e: f.real(c) for e, c in self.coeffs.items()}
        return ActionPolynomial(self.n_dof, f, {e: c for e, c in coeffs.items() if c != 0})

    def imag_max(self) -> float:
        return max((abs(complex(c).imag) for c in self.coeffs.values()), default=0.0)

    def allclose(self, other: ActionPolynomial, tol: float | None = None) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        t = self.field.tol if tol is None else tol
        if self.field.exact:
            return all(self.coeff(k) == other.coeff(k) for k in keys)
        return all(abs(complex(self.coeff(k)) - complex(other.coeff(k))) <= t for k in keys)

    def __repr__(self) -> str:
        body = " + ".join(
            f"({c})*" + "*".join(f"ι{j + 1}^{p}" for j, p in enumerate(e) if p)
            for e, c in self.items()
        )
        return f"ActionPolynomial({body or '0'})"


@dataclass(frozen=True)
class ActionExpression:
    """F(ι; h) = Σ_j h^j F_j(ι), with the action definitions of ``qnf``."""

    qnf: QuadraticNormalForm
    layers: tuple[ActionPolynomial, ...]
    trunc: int

    @property
    def h_trunc(self) -> int:
        return len(self.layers) - 1

    def evaluate(self) -> list[Jet]:
        """Substitute ι(ρ) back; layer j is a jet truncated at N − 2j."""
        out = []
        for j, F in enumerate(self.layers):
            N = max(self.trunc - 2 * j, 0)
            out.append(substitute(F, self.qnf.actions(N), N))
        return out

    def leading_coefficients(self) -> list[Any]:
        return self.layers[0].linear_coefficients()


def _poly_mul(
    a: dict[Exponent, Any], b: dict[Exponent, Any], max_deg: int
) -> dict[Exponent, Any]:
    out: dict[Exponent, Any] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb, strict=True))
            if sum(e) > max_deg:
                continue
            v = ca * cb
            out[e] = out[e] + v if e in out else v
    return out


def jet_to_actions(
    total: Jet, qnf: QuadraticNormalForm, tol: float | None = None
) -> ActionPolynomial:
    """F with F(ι(ρ)) = total, for a resonant jet in block coordinates."""
    f = total.field
    n = total.n_dof
    N = total.trunc
    tc = linear_pullback(total, qnf.complexifier())
    images = qnf.action_images()
    max_deg = N // 2
    powers: dict[tuple[int, int], dict[Exponent, Any]] = {}

    def power(j: int, k: int) -> dict[Exponent, Any]:
        if (j, k) not in powers:
            if k == 0:
                powers[(j, k)] = {(0,) * n: f.one}
            else:
                powers[(j, k)] = _poly_mul(power(j, k - 1), images[j], max_deg)
        return powers[(j, k)]

    coeffs: dict[Exponent, Any] = {}
    t = f.tol if tol is None else tol
    for e, c in tc.terms.items():
        alpha, beta = split(e)
        if alpha != beta:
            if f.is_zero(c, t):
                continue
            raise PreconditionError(
                "non-resonant monomial in a normal form", exp=list(e), value=str(c)
            )
        term: dict[Exponent, Any] = {(0,) * n: c}
        for j, k in enumerate(alpha):
            if k:
                term = _poly_mul(term, power(j, k), max_deg)
        for k, v in term.items():
            coeffs[k] = coeffs[k] + v if k in coeffs else v
    poly = ActionPolynomial(n, f, {k: v for k, v in coeffs.items() if v != 0})
    imag = poly.imag_max()
    if imag > (0.0 if f.exact else max(f.tol, 1e-8)):
        logger.warning("actions_not_real", imaginary=imag)
        return poly
    return poly.real_part()


def to_actions(r: Jet, qnf: QuadraticNormalForm) -> ActionExpression:
    """F(ι) with F(ι(ρ)) = p₀ + r."""
    p0 = qnf.quadratic_part(r.trunc)
    F = jet_to_actions(p0 + r, qnf)
    return ActionExpression(qnf=qnf, layers=(F,), trunc=r.trunc)


def layers_to_actions(
    layers: Sequence[Jet], qnf: QuadraticNormalForm, trunc: int
) -> ActionExpression:
    """Per-h-layer action expressions of a resonant h-jet (quadratic part in layer 0)."""
    return ActionExpression(
        qnf=qnf, layers=tuple(jet_to_actions(layer, qnf) for layer in layers), trunc=trunc
    )


# ── Full classical pipeline ──


@dataclass(frozen=True)
class NormalFormReport:
    kappa0: np.ndarray
    reduction: BirkhoffResult
    actions: ActionExpression

    @property
    def kappa(self) -> MapJet:
        return self.reduction.kappa

    @property
    def r(self) -> Jet:
        return self.reduction.r


def normalize(p: Jet, trunc: int | None = None) -> NormalFormReport:
    """Linear block normalization followed by the nonlinear reduction."""
    N = p.trunc if trunc is None else trunc
    f = p.field
    p2 = p.degree_part(2)
    try:
        qnf = QuadraticNormalForm.from_quadratic(p2)
        p_block = p.truncate(N)
    except PreconditionError:
        if f.exact:
            raise
        qnf = quadratic_normalize(hamilton_matrix(p2))
        p_block = compose(p.truncate(N), MapJet.linear(qnf.kappa0, N, f))
    result = birkhoff_reduce(p_block, N, qnf)
    return NormalFormReport(
        kappa0=qnf.kappa0 if qnf.kappa0 is not None else identity(2 * p.n_dof, f),
        reduction=result,
        actions=to_actions(result.r, qnf),
    )


def loxodromic_action_bracket(qnf: QuadraticNormalForm, j: int = 0) -> Jet:
    """{ι_j, ι_{n_hc+j}}; vanishes identically."""
    acts = qnf.actions(4)
    return poisson(acts[j], acts[qnf.n_hc + j])


"""
Map germs fixing the origin, as 2n-tuples of jets, and Hamiltonian flows.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

import numpy as np

from ..errors import FieldError, JetShapeError, PreconditionError
from ..fields import Field
from .jet import Jet, multiply_terms, poisson
from .matrices import as_matrix, inverse, max_entry, symplectic_form, symplectic_inverse
from .monomials import Exponent, unit
from .operators import GradedOperator, JetBasis


def substitute(a: Jet, images: Sequence[Jet], trunc: int | None = None) -> Jet:
    """a(images[0], images[1], ...) truncated at ``trunc``.

    ``a`` may be a polynomial in any number of variables as long as ``images``
    lists one jet per variable; the result lives in the images' space.
    """
    if not images:
        raise JetShapeError("no images to substitute")
    like = images[0]
    N = min(im.trunc for im in images) if trunc is None else trunc
    field = like.field
    if field.name != a.field.name:
        raise FieldError("mixed coefficient fields in one computation")
    mins = [im.min_degree if im.min_degree is not None else N + 1 for im in images]
    powers: dict[tuple[int, int], dict[Exponent, Any]] = {}

    def power(var: int, k: int) -> dict[Exponent, Any]:
        key = (var, k)
        if key not in powers:
            if k == 1:
                powers[key] = {e: c for e, c in images[var].terms.items() if sum(e) <= N}
            else:
                half = k // 2
                powers[key] = multiply_terms(power(var, half), power(var, k - half), N)
        return powers[key]

    out: dict[Exponent, Any] = {}
    for e, c in a.items():
        low = sum(p * m for p, m in zip(e, mins, strict=True))
        if low > N:
            continue
        prod: dict[Exponent, Any] = {(0,) * like.nvars: c}
        for var, p in enumerate(e):
            if p:
                prod = multiply_terms(prod, power(var, p), N)
                if not prod:
                    break
        for k, v in prod.items():
            out[k] = out[k] + v if k in out else v
    return Jet._raw(like.n_dof, N, field, out)


def compose(a: Jet, m: MapJet) -> Jet:
    """Taylor expansion of a∘m, truncated at min(a.trunc, m.trunc)."""
    if a.n_dof != m.n_dof:
        raise JetShapeError("mismatched number of degrees of freedom", left=a.n_dof, right=m.n_dof)
    return substitute(a, m.components, min(a.trunc, m.trunc))


def linear_pullback(a: Jet, matrix: Any) -> Jet:
    """a(Mρ) at a's own truncation."""
    if a.trunc < 1:
        return a
    return compose(a, MapJet.linear(matrix, a.trunc, a.field))


class MapJet:
    __slots__ = ("components", "trunc", "n_dof", "field")

    def __init__(self, components: Sequence[Jet], trunc: int | None = None) -> None:
        comps = list(components)
        if not comps or len(comps) % 2:
            raise JetShapeError("a map jet needs 2n components", count=len(comps))
        n = len(comps) // 2
        field = comps[0].field
        for c in comps:
            if c.n_dof != n:
                raise JetShapeError("component in the wrong phase space", n_dof=c.n_dof)
            if c.field.name != field.name:
                raise FieldError("mixed coefficient fields in one computation")
        N = min(c.trunc for c in comps) if trunc is None else trunc
        comps = [c.truncate(N) for c in comps]
        for i, c in enumerate(comps):
            if c.constant_term() != 0:
                raise PreconditionError("map germ must fix the origin", component=i)
        self.components = tuple(comps)
        self.trunc = N
        self.n_dof = n
        self.field = field

    # ── Constructors ──

    @classmethod
    def identity(cls, n_dof: int, trunc: int, field: Field | None = None) -> MapJet:
        return cls([Jet.coordinate(i, n_dof, trunc, field) for i in range(2 * n_dof)], trunc)

    @classmethod
    def linear(cls, matrix: Any, trunc: int, field: Field | None = None) -> MapJet:
        """ρ ↦ Aρ."""
        from .jet import default_field

        f = field or default_field()
        a = as_matrix(matrix, f)
        dim = a.shape[0]
        if a.shape != (dim, dim) or dim % 2:
            raise JetShapeError("linear map needs an even square matrix", shape=list(a.shape))
        n = dim // 2
        comps = [
            Jet._raw(n, trunc, f, {unit(dim, k): a[i, k] for k in range(dim) if a[i, k] != 0})
            for i in range(dim)
        ]
        return cls(comps, trunc)

    # ── Access ──

    def __getitem__(self, i: int) -> Jet:
        return self.components[i]

    def __len__(self) -> int:
        return len(self.components)

    def linear_part(self) -> np.ndarray:
        dim = 2 * self.n_dof
        rows = [[c.coeff(unit(dim, k)) for k in range(dim)] for c in self.components]
        return as_matrix(rows, self.field)

    def degree_part(self, d: int) -> list[Jet]:
        return [c.degree_part(d) for c in self.components]

    def truncate(self, trunc: int) -> MapJet:
        return MapJet([c.truncate(trunc) for c in self.components], trunc)

    # ── Algebra ──

    def compose(self, other: MapJet) -> MapJet:
        """self∘other."""
        N = min(self.trunc, other.trunc)
        return MapJet([substitute(c, other.components, N) for c in self.components], N)

    def __matmul__(self, other: MapJet) -> MapJet:
        return self.compose(other)

    def __sub__(self, other: MapJet) -> list[Jet]:
        return [a - b for a, b in zip(self.components, other.components, strict=True)]

    def inverse(self) -> MapJet:
        """Degreewise back-substitution y = A⁻¹(ρ − nl(y))."""
        N = self.trunc
        A = self.linear_part()
        J = symplectic_form(self.n_dof, self.field)
        is_symp = max_entry(A.T @ J @ A - J) <= (1e-12 if not self.field.exact else 0.0)
        A_inv = symplectic_inverse(A, self.field) if is_symp else inverse(A, self.field)
        lin_inv = MapJet.linear(A_inv, N, self.field)
        nonlinear = MapJet([c - c.degree_part(1) for c in self.components], N)
        ident = MapJet.identity(self.n_dof, N, self.field)
        y = lin_inv
        for _ in range(max(N - 1, 0)):
            nl_y = nonlinear.compose(y)
            y = lin_inv.compose(MapJet(ident - nl_y, N))
        return y

    def symplectic_residual(self) -> float:
        """max |{κ_a, κ_b} − {ρ_a, ρ_b}| up to degree N−1 (0.0 when exact)."""
        n = self.n_dof
        N = self.trunc - 1
        if N < 0:
            return 0.0
        worst = 0.0
        for a in range(2 * n):
            for b in range(a + 1, 2 * n):
                br = poisson(self.components[a], self.components[b], N)
                canon = 0
                if b == n + a:
                    canon = -1
                worst = max(worst, (br - canon).max_abs())
        return worst

    def is_symplectic(self, tol: float | None = None) -> bool:
        if self.field.exact:
            return self.symplectic_residual() == 0.0
        return self.symplectic_residual() <= (self.field.tol if tol is None else tol)

    def allclose(self, other: MapJet, tol: float | None = None) -> bool:
        return all(d.is_zero(tol) for d in self - other)

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MapJet):
            return NotImplemented
        return self.components == other.components

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"MapJet(n={self.n_dof}, N={self.trunc}, components={list(self.components)})"


# ── Hamiltonian flows ──


def lie_operator(p: Jet, trunc: int, lo: int = 1) -> GradedOperator:
    """u ↦ {p, u} on jets of degree lo..trunc."""
    if any(sum(e) == 1 for e in p.terms):
        raise PreconditionError("Hamiltonian has a linear part; the flow does not fix 0")
    basis = JetBasis(p.n_dof, lo, trunc, trunc, p.field)
    nilpotent = p.degree_part(2).is_zero(0.0)
    return GradedOperator(
        lambda u: poisson(p, u, trunc), basis, nilpotent=nilpotent, name="lie_derivative"
    )


def flow_jet(p: Jet, t: Any, trunc: int) -> MapJet:
    """Time-t flow of H_p as a map jet at order ``trunc``.

    Every term of p up to degree trunc+1 contributes. Exact coefficients
    require a nilpotent Lie action (nilpotent quadratic part).
    """
    n = p.n_dof
    op = lie_operator(p.degree_range(1, trunc + 1), trunc)
    coords = [Jet.coordinate(i, n, trunc, p.field) for i in range(2 * n)]
    return MapJet(op.exp_apply_many(coords, t), trunc)

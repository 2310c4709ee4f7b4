"""
Linear operators on truncated jet spaces.

``GradedOperator`` wraps an action ``u ↦ L(u)`` (typically u ↦ {p, u}) on a
finite monomial basis and evaluates exp(tL)v, φ₁(L)v and φ₁(L)⁻¹v with
φ₁(z) = (e^z − 1)/z. Over the exact field only terminating series are
available; over floats the operator is assembled as a sparse matrix.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Any

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
import structlog

from ..errors import FieldError, ResonanceError
from ..fields import Field
from ..interfaces import GradedVector
from .monomials import Exponent, monomials_up_to

logger = structlog.get_logger(__name__)


@lru_cache(maxsize=64)
def bernoulli(k: int) -> Fraction:
    """Bernoulli numbers with B₁ = −1/2, so z/(e^z − 1) = Σ B_k z^k / k!."""
    if k == 0:
        return Fraction(1)
    return -sum((comb(k + 1, j) * bernoulli(j) for j in range(k)), Fraction(0)) / (k + 1)


# ── Bases ──


class JetBasis:
    """Monomials of degree lo..hi in 2n variables, graded-lex ordered."""

    def __init__(self, n_dof: int, lo: int, hi: int, trunc: int, field: Field) -> None:
        self.n_dof = n_dof
        self.trunc = trunc
        self.field = field
        self.monomials: tuple[Exponent, ...] = monomials_up_to(2 * n_dof, lo, hi)
        self.index = {m: i for i, m in enumerate(self.monomials)}

    @property
    def dim(self) -> int:
        return len(self.monomials)

    def basis_element(self, i: int) -> Any:
        from .jet import Jet

        return Jet._raw(self.n_dof, self.trunc, self.field, {self.monomials[i]: self.field.one})

    def to_vector(self, jet: Any) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        for e, c in jet.terms.items():
            i = self.index.get(e)
            if i is not None:
                v[i] = complex(c)
        return v

    def from_vector(self, v: np.ndarray) -> Any:
        from .jet import Jet

        terms = {self.monomials[i]: complex(c) for i, c in enumerate(v) if c != 0}
        return Jet._raw(self.n_dof, self.trunc, self.field, terms)


class HJetBasis:
    """Weighted basis h^j ρ^α with |α| + 2j ≤ N, j ≤ M, |α| ≥ lo."""

    def __init__(self, n_dof: int, trunc: int, h_trunc: int, field: Field, lo: int = 0) -> None:
        self.n_dof = n_dof
        self.trunc = trunc
        self.h_trunc = h_trunc
        self.field = field
        self.elements: list[tuple[int, Exponent]] = [
            (j, m)
            for j in range(h_trunc + 1)
            for m in monomials_up_to(2 * n_dof, lo, trunc - 2 * j)
        ]
        self.index = {el: i for i, el in enumerate(self.elements)}

    @property
    def dim(self) -> int:
        return len(self.elements)

    def basis_element(self, i: int) -> Any:
        from .hjet import HJet

        j, m = self.elements[i]
        return HJet.monomial(j, m, self.field.one, self.n_dof, self.trunc, self.h_trunc, self.field)

    def to_vector(self, hjet: Any) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        for j, layer in enumerate(hjet.layers):
            for e, c in layer.terms.items():
                i = self.index.get((j, e))
                if i is not None:
                    v[i] = complex(c)
        return v

    def from_vector(self, v: np.ndarray) -> Any:
        from .hjet import HJet

        layers: list[dict[Exponent, Any]] = [{} for _ in range(self.h_trunc + 1)]
        for i, c in enumerate(v):
            if c != 0:
                j, m = self.elements[i]
                layers[j][m] = complex(c)
        return HJet.from_terms(layers, self.n_dof, self.trunc, self.h_trunc, self.field)


Basis = JetBasis | HJetBasis


# ── Operator ──


class GradedOperator:
    def __init__(
        self,
        apply: Callable[[Any], Any],
        basis: Basis,
        *,
        nilpotent: bool = False,
        name: str = "operator",
    ) -> None:
        self.apply = apply
        self.basis = basis
        self.field = basis.field
        self.nilpotent = nilpotent
        self.name = name
        self._matrix: scipy.sparse.csr_matrix | None = None

    @property
    def use_series(self) -> bool:
        return self.field.exact or self.nilpotent

    def matrix(self) -> scipy.sparse.csr_matrix:
        if self._matrix is None:
            cols = [self.basis.to_vector(self.apply(self.basis.basis_element(i)))
                    for i in range(self.basis.dim)]
            dense = np.column_stack(cols) if cols else np.zeros((0, 0), dtype=complex)
            self._matrix = scipy.sparse.csr_matrix(dense)
            logger.debug("operator_assembled", name=self.name, dim=self.basis.dim,
                         nnz=int(self._matrix.nnz))
        return self._matrix

    # ── Series (exact or nilpotent) ──

    def _series(self, v: GradedVector, coeff: Callable[[int], Any]) -> GradedVector:
        cap = self.basis.dim + 1
        out = v.scale(coeff(0))
        term = v
        for k in range(1, cap + 1):
            term = self.apply(term)
            if term.is_zero(0.0 if not self.field.exact else None):
                return out
            c = coeff(k)
            if c != 0:
                out = out + term.scale(c)
        if self.field.exact:
            raise FieldError(
                "operator is not nilpotent; the series is not exact",
                operator=self.name,
            )
        return out

    # ── Public evaluations ──

    def exp_apply(self, v: GradedVector, t: Any = 1) -> GradedVector:
        """exp(tL) v."""
        if self.use_series:
            tt = self.field.coerce(t)
            return self._series(v, lambda k: tt**k / factorial(k))
        vec = self.basis.to_vector(v)
        out = scipy.sparse.linalg.expm_multiply(complex(t) * self.matrix(), vec)
        return self.basis.from_vector(out)

    def exp_apply_many(self, vs: Sequence[GradedVector], t: Any = 1) -> list[GradedVector]:
        if self.use_series or not vs:
            return [self.exp_apply(v, t) for v in vs]
        block = np.column_stack([self.basis.to_vector(v) for v in vs])
        out = scipy.sparse.linalg.expm_multiply(complex(t) * self.matrix(), block)
        return [self.basis.from_vector(out[:, i]) for i in range(out.shape[1])]

    def phi1_apply(self, v: GradedVector) -> GradedVector:
        """φ₁(L) v = Σ L^k v / (k+1)!."""
        if self.use_series:
            return self._series(v, lambda k: self.field.coerce(Fraction(1, factorial(k + 1))))
        m = self.matrix()
        d = m.shape[0]
        vec = self.basis.to_vector(v)
        aug = scipy.sparse.bmat(
            [[m, scipy.sparse.csr_matrix(vec.reshape(-1, 1))],
             [None, scipy.sparse.csr_matrix((1, 1), dtype=complex)]],
            format="csr",
        )
        e_last = np.zeros(d + 1, dtype=complex)
        e_last[-1] = 1.0
        out = scipy.sparse.linalg.expm_multiply(aug, e_last)
        return self.basis.from_vector(out[:d])

    def phi1_matrix(self) -> np.ndarray:
        m = self.matrix().toarray()
        d = m.shape[0]
        aug = np.zeros((2 * d, 2 * d), dtype=complex)
        aug[:d, :d] = m
        aug[:d, d:] = np.eye(d)
        return scipy.linalg.expm(aug)[:d, d:]

    def phi1_solve(self, v: GradedVector) -> GradedVector:
        """Solve φ₁(L) u = v."""
        if self.use_series:
            return self._series(
                v, lambda k: self.field.coerce(bernoulli(k) / factorial(k))
            )
        phi = self.phi1_matrix()
        vec = self.basis.to_vector(v)
        try:
            sol = np.linalg.solve(phi, vec)
        except np.linalg.LinAlgError as exc:
            raise ResonanceError(
                "averaged operator is singular", k=(), condition="averaged"
            ) from exc
        return self.basis.from_vector(sol)

"""
Matrix helpers over both coefficient fields.

Exact matrices are numpy object arrays of ``GaussianRational``; float
matrices are complex128 (callers take ``.real`` where a real matrix is
expected).
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..errors import FieldError, JetShapeError, PreconditionError
from ..fields import Field, GaussianRational


def as_matrix(values: Any, field: Field) -> np.ndarray:
    if field.exact:
        rows = [[field.coerce(v) for v in row] for row in values]
        m = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                m[i, j] = v
        return m
    arr = np.asarray(values)
    if arr.dtype == object:
        arr = np.vectorize(complex, otypes=[complex])(arr)
    return arr.astype(complex)


def identity(dim: int, field: Field) -> np.ndarray:
    if field.exact:
        return as_matrix([[1 if i == j else 0 for j in range(dim)] for i in range(dim)], field)
    return np.eye(dim, dtype=complex)


def zeros(dim: int, field: Field) -> np.ndarray:
    return as_matrix([[0] * dim for _ in range(dim)], field)


def symplectic_form(n_dof: int, field: Field) -> np.ndarray:
    """J with σ(ρ, ρ′) = ⟨Jρ, ρ′⟩, J(x, ξ) = (ξ, −x)."""
    dim = 2 * n_dof
    rows = [[0] * dim for _ in range(dim)]
    for j in range(n_dof):
        rows[j][n_dof + j] = 1
        rows[n_dof + j][j] = -1
    return as_matrix(rows, field)


def check_square_even(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise JetShapeError("matrix must be square", shape=list(m.shape))
    if m.shape[0] % 2:
        raise PreconditionError("matrix dimension must be even", dim=m.shape[0])
    return m.shape[0] // 2


def max_entry(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    if m.dtype == object:
        return max(abs(complex(v)) for v in m.flat)
    return float(np.max(np.abs(m)))


def is_zero(m: np.ndarray, field: Field, tol: float | None = None) -> bool:
    if field.exact:
        return all(not v for v in m.flat)
    return max_entry(m) <= (field.tol if tol is None else tol)


def inverse(m: np.ndarray, field: Field) -> np.ndarray:
    if not field.exact:
        return np.linalg.inv(m)
    n = m.shape[0]
    a = [[GaussianRational.lift(v) for v in row] for row in m.tolist()]
    inv = [[GaussianRational.lift(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise PreconditionError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        inv[col] = [v / p for v in inv[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col], strict=True)]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col], strict=True)]
    return as_matrix(inv, field)


def symplectic_inverse(m: np.ndarray, field: Field) -> np.ndarray:
    """A⁻¹ = −J Aᵀ J for symplectic A."""
    J = symplectic_form(m.shape[0] // 2, field)
    return -(J @ m.T @ J)


def to_real(m: np.ndarray, tol: float) -> np.ndarray:
    if m.dtype == object:
        raise FieldError("exact matrix has no float real part")
    if np.max(np.abs(m.imag), initial=0.0) > tol:
        raise PreconditionError("matrix is not real", imag=float(np.max(np.abs(m.imag))))
    return np.real(m).astype(float)


def to_rows(m: np.ndarray) -> list[list[Any]]:
    return [list(row) for row in m.tolist()]


def rank(m: np.ndarray, field: Field, tol: float | None = None) -> int:
    if not field.exact:
        s = np.linalg.svd(m, compute_uv=False)
        scale = max(1.0, float(s[0])) if s.size else 1.0
        return int(np.sum(s > (field.tol if tol is None else tol) * scale))
    a = [[GaussianRational.lift(v) for v in row] for row in m.tolist()]
    rows, cols = len(a), len(a[0]) if a else 0
    r = 0
    for col in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(r + 1, rows):
            if a[i][col]:
                f = a[i][col] / a[r][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r], strict=True)]
        r += 1
    return r


def matrix_power(m: np.ndarray, k: int, field: Field) -> np.ndarray:
    out = identity(m.shape[0], field)
    for _ in range(k):
        out = out @ m
    return out

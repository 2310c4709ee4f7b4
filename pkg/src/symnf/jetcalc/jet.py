"""
Truncated polynomial jets in 2n phase-space variables.

A ``Jet`` is a sparse mapping exponent -> coefficient, every exponent of
total degree at most ``trunc``. Variables are ordered (x₁..x_n, ξ₁..ξ_n).
All operations return new jets; nothing is mutated after construction.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping
from typing import Any

from ..config import settings
from ..errors import FieldError, JetShapeError
from ..fields import Field, get_field
from .monomials import Exponent, format_monomial, graded_key, unit


def default_field() -> Field:
    return get_field(settings.field, settings.tol)


class Jet:
    __slots__ = ("n_dof", "trunc", "field", "_terms")

    def __init__(
        self,
        n_dof: int,
        trunc: int,
        terms: Mapping[Exponent, Any] | Iterable[tuple[Exponent, Any]] | None = None,
        field: Field | None = None,
    ) -> None:
        if n_dof < 1:
            raise JetShapeError("n_dof must be positive", n_dof=n_dof)
        if trunc < -1:
            raise JetShapeError("truncation order must be >= -1", trunc=trunc)
        self.n_dof = n_dof
        self.trunc = trunc
        self.field = field or default_field()
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        store: dict[Exponent, Any] = {}
        for exp, coeff in items:
            e = tuple(int(v) for v in exp)
            if len(e) != 2 * n_dof or any(v < 0 for v in e):
                raise JetShapeError("bad exponent vector", exp=list(e), n_dof=n_dof)
            if sum(e) > trunc:
                continue
            c = self.field.coerce(coeff)
            if e in store:
                c = store[e] + c
            store[e] = c
        self._terms = {e: c for e, c in store.items() if c != 0}

    @classmethod
    def _raw(cls, n_dof: int, trunc: int, field: Field, terms: dict[Exponent, Any]) -> Jet:
        jet = object.__new__(cls)
        jet.n_dof = n_dof
        jet.trunc = trunc
        jet.field = field
        jet._terms = {e: c for e, c in terms.items() if c != 0}
        return jet

    def _like(self, terms: dict[Exponent, Any]) -> Jet:
        return Jet._raw(self.n_dof, self.trunc, self.field, terms)

    # ── Constructors ──

    @classmethod
    def zero(cls, n_dof: int, trunc: int, field: Field | None = None) -> Jet:
        return cls._raw(n_dof, trunc, field or default_field(), {})

    @classmethod
    def constant(cls, value: Any, n_dof: int, trunc: int, field: Field | None = None) -> Jet:
        return cls(n_dof, trunc, {(0,) * (2 * n_dof): value}, field)

    @classmethod
    def coordinate(
        cls, index: int, n_dof: int, trunc: int, field: Field | None = None, coeff: Any = 1
    ) -> Jet:
        """ρ_index, with ρ = (x₁..x_n, ξ₁..ξ_n)."""
        if not 0 <= index < 2 * n_dof:
            raise JetShapeError("coordinate index out of range", index=index, n_dof=n_dof)
        return cls(n_dof, trunc, {unit(2 * n_dof, index): coeff}, field)

    @classmethod
    def x(cls, i: int, n_dof: int, trunc: int, field: Field | None = None) -> Jet:
        return cls.coordinate(i, n_dof, trunc, field)

    @classmethod
    def xi(cls, i: int, n_dof: int, trunc: int, field: Field | None = None) -> Jet:
        return cls.coordinate(n_dof + i, n_dof, trunc, field)

    @classmethod
    def monomial(
        cls, exp: Exponent, coeff: Any, n_dof: int, trunc: int, field: Field | None = None
    ) -> Jet:
        return cls(n_dof, trunc, {tuple(exp): coeff}, field)

    # ── Access ──

    @property
    def nvars(self) -> int:
        return 2 * self.n_dof

    @property
    def terms(self) -> dict[Exponent, Any]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponent, Any]]:
        """Terms in graded-lex order (deterministic output)."""
        return sorted(self._terms.items(), key=lambda kv: graded_key(kv[0]))

    def __iter__(self) -> Iterator[tuple[Exponent, Any]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coeff(self, exp: Exponent) -> Any:
        return self._terms.get(tuple(exp), self.field.zero)

    def degrees(self) -> list[int]:
        return sorted({sum(e) for e in self._terms})

    @property
    def min_degree(self) -> int | None:
        return min((sum(e) for e in self._terms), default=None)

    @property
    def max_degree(self) -> int | None:
        return max((sum(e) for e in self._terms), default=None)

    def constant_term(self) -> Any:
        return self.coeff((0,) * self.nvars)

    def degree_part(self, d: int) -> Jet:
        return self._like({e: c for e, c in self._terms.items() if sum(e) == d})

    def degree_range(self, lo: int, hi: int) -> Jet:
        return self._raw(
            self.n_dof,
            self.trunc,
            self.field,
            {e: c for e, c in self._terms.items() if lo <= sum(e) <= hi},
        )

    def truncate(self, trunc: int) -> Jet:
        return self._raw(
            self.n_dof, trunc, self.field, {e: c for e, c in self._terms.items() if sum(e) <= trunc}
        )

    def with_trunc(self, trunc: int) -> Jet:
        """Re-declare the truncation order (dropping terms above it)."""
        return self.truncate(trunc)

    # ── Compatibility ──

    def _check(self, other: Jet) -> None:
        if self.n_dof != other.n_dof:
            raise JetShapeError(
                "mismatched number of degrees of freedom", left=self.n_dof, right=other.n_dof
            )
        if self.field.name != other.field.name:
            raise FieldError(
                "mixed coefficient fields in one computation",
                left=self.field.name,
                right=other.field.name,
            )

    def _scalar(self, value: Any) -> Any:
        return self.field.coerce(value)

    # ── Arithmetic ──

    def __add__(self, other: Any) -> Jet:
        if not isinstance(other, Jet):
            return self + Jet.constant(other, self.n_dof, self.trunc, self.field)
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        out = {e: c for e, c in self._terms.items() if sum(e) <= trunc}
        for e, c in other._terms.items():
            if sum(e) <= trunc:
                out[e] = out[e] + c if e in out else c
        return self._raw(self.n_dof, trunc, self.field, out)

    def __radd__(self, other: Any) -> Jet:
        return self + other

    def __neg__(self) -> Jet:
        return self._like({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Any) -> Jet:
        return self + (-other)

    def __rsub__(self, other: Any) -> Jet:
        return (-self) + other

    def scale(self, value: Any) -> Jet:
        s = self._scalar(value)
        if s == 0:
            return self.zero(self.n_dof, self.trunc, self.field)
        return self._like({e: s * c for e, c in self._terms.items()})

    def __mul__(self, other: Any) -> Jet:
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        return self._raw(
            self.n_dof, trunc, self.field, multiply_terms(self._terms, other._terms, trunc)
        )

    def __rmul__(self, other: Any) -> Jet:
        return self.scale(other)

    def __truediv__(self, other: Any) -> Jet:
        if isinstance(other, Jet):
            return NotImplemented
        return self.scale(self.field.one / self._scalar(other))

    def __pow__(self, k: int) -> Jet:
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Jet.constant(1, self.n_dof, self.trunc, self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # ── Calculus ──

    def diff(self, var: int) -> Jet:
        """∂/∂ρ_var; the result keeps the truncation order of ``self``."""
        out: dict[Exponent, Any] = {}
        for e, c in self._terms.items():
            p = e[var]
            if p:
                f = list(e)
                f[var] -= 1
                out[tuple(f)] = c * p
        return self._like(out)

    def map_coeffs(self, fn: Callable[[Any], Any]) -> Jet:
        return self._like({e: fn(c) for e, c in self._terms.items()})

    def conj(self) -> Jet:
        return self.map_coeffs(self.field.conj)

    def real_part(self) -> Jet:
        return self.map_coeffs(self.field.real)

    def imag_part(self) -> Jet:
        return self.map_coeffs(self.field.imag)

    def chop(self, tol: float | None = None) -> Jet:
        """Drop coefficients below tolerance (float field; identity for exact)."""
        if self.field.exact:
            return self
        t = self.field.tol if tol is None else tol
        return self._like({e: c for e, c in self._terms.items() if abs(c) > t})

    def as_field(self, field: Field) -> Jet:
        if field.name == self.field.name:
            return self
        if field.exact:
            raise FieldError("cannot convert a float jet to the exact field")
        return self._raw(
            self.n_dof, self.trunc, field, {e: complex(c) for e, c in self._terms.items()}
        )

    # ── Predicates ──

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_zero(self, tol: float | None = None) -> bool:
        if self.field.exact:
            return not self._terms
        t = self.field.tol if tol is None else tol
        return self.max_abs() <= t

    def is_real(self, tol: float | None = None) -> bool:
        return all(self.field.is_real(c, tol) for c in self._terms.values())

    def allclose(self, other: Jet, tol: float | None = None) -> bool:
        return (self - other).is_zero(tol)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.n_dof == other.n_dof
            and self.field.name == other.field.name
            and self._terms == other._terms
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{format_monomial(e)}" for e, c in self.items()) or "0"
        return f"Jet(n={self.n_dof}, N={self.trunc}: {body})"


# ── Term-level kernels ──


def _by_degree(terms: Mapping[Exponent, Any]) -> dict[int, list[tuple[Exponent, Any]]]:
    buckets: dict[int, list[tuple[Exponent, Any]]] = defaultdict(list)
    for e, c in terms.items():
        buckets[sum(e)].append((e, c))
    return buckets


def multiply_terms(
    a: Mapping[Exponent, Any], b: Mapping[Exponent, Any], trunc: int
) -> dict[Exponent, Any]:
    out: dict[Exponent, Any] = {}
    if not a or not b:
        return out
    ba, bb = _by_degree(a), _by_degree(b)
    for da, ta in ba.items():
        for db, tb in bb.items():
            if da + db > trunc:
                continue
            for ea, ca in ta:
                for eb, cb in tb:
                    e = tuple(x + y for x, y in zip(ea, eb, strict=True))
                    v = ca * cb
                    out[e] = out[e] + v if e in out else v
    return out


def poisson(a: Jet, b: Jet, trunc: int | None = None) -> Jet:
    """{a, b} = Σ_j ∂_{ξ_j}a ∂_{x_j}b − ∂_{x_j}a ∂_{ξ_j}b = H_a(b)."""
    a._check(b)
    n = a.n_dof
    N = min(a.trunc, b.trunc) if trunc is None else trunc
    out: dict[Exponent, Any] = {}
    ba, bb = _by_degree(a._terms), _by_degree(b._terms)
    for da, ta in ba.items():
        for db, tb in bb.items():
            if da + db - 2 > N or da == 0 or db == 0:
                continue
            for ea, ca in ta:
                for eb, cb in tb:
                    for j in range(n):
                        w = ea[n + j] * eb[j] - ea[j] * eb[n + j]
                        if not w:
                            continue
                        e = list(ea)
                        for k, v in enumerate(eb):
                            e[k] += v
                        e[j] -= 1
                        e[n + j] -= 1
                        key = tuple(e)
                        v = ca * cb * w
                        out[key] = out[key] + v if key in out else v
    return Jet._raw(n, N, a.field, out)


def hamilton_field(p: Jet) -> list[Jet]:
    """H_p = (∂_ξ p, −∂_x p) as 2n component jets."""
    n = p.n_dof
    return [p.diff(n + j) for j in range(n)] + [-p.diff(j) for j in range(n)]


def jet_sum(jets: Iterable[Jet], like: Jet) -> Jet:
    out = Jet.zero(like.n_dof, like.trunc, like.field)
    for j in jets:
        out = out + j
    return out

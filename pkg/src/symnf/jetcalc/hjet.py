"""
Semiclassical symbol jets Σ_{j≤M} h^j a_j(ρ).

Truncation is by weight: h counts as degree two, so layer j keeps
ρ-degrees up to N − 2j. This filtration is preserved by the pointwise
product and by the Moyal product alike.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from fractions import Fraction
from math import factorial
from typing import Any

from ..errors import FieldError, JetShapeError, PreconditionError
from ..fields import Field
from .jet import Jet, default_field
from .monomials import Exponent


def layer_trunc(trunc: int, j: int) -> int:
    return max(trunc - 2 * j, -1)


class HJet:
    __slots__ = ("n_dof", "trunc", "h_trunc", "field", "layers")

    def __init__(self, layers: Sequence[Jet], trunc: int, h_trunc: int) -> None:
        if h_trunc < 0:
            raise JetShapeError("h truncation must be nonnegative", h_trunc=h_trunc)
        if not layers:
            raise JetShapeError("an h-jet needs at least one layer")
        first = layers[0]
        out: list[Jet] = []
        for j in range(h_trunc + 1):
            lt = layer_trunc(trunc, j)
            if j < len(layers):
                layer = layers[j]
                if layer.n_dof != first.n_dof:
                    raise JetShapeError("layers in different phase spaces", layer=j)
                if layer.field.name != first.field.name:
                    raise FieldError("mixed coefficient fields in one computation")
                out.append(layer.truncate(lt))
            else:
                out.append(Jet.zero(first.n_dof, lt, first.field))
        self.n_dof = first.n_dof
        self.trunc = trunc
        self.h_trunc = h_trunc
        self.field = first.field
        self.layers = tuple(out)

    # ── Constructors ──

    @classmethod
    def from_terms(
        cls,
        layers: Sequence[dict[Exponent, Any]],
        n_dof: int,
        trunc: int,
        h_trunc: int,
        field: Field | None = None,
    ) -> HJet:
        f = field or default_field()
        jets = [Jet(n_dof, layer_trunc(trunc, j), terms, f) for j, terms in enumerate(layers)]
        if not jets:
            jets = [Jet.zero(n_dof, trunc, f)]
        return cls(jets, trunc, h_trunc)

    @classmethod
    def from_jet(cls, a: Jet, trunc: int | None = None, h_trunc: int = 0) -> HJet:
        N = a.trunc if trunc is None else trunc
        return cls([a], N, h_trunc)

    @classmethod
    def zero(cls, n_dof: int, trunc: int, h_trunc: int, field: Field | None = None) -> HJet:
        return cls([Jet.zero(n_dof, trunc, field)], trunc, h_trunc)

    @classmethod
    def constant(
        cls, value: Any, n_dof: int, trunc: int, h_trunc: int, field: Field | None = None
    ) -> HJet:
        return cls([Jet.constant(value, n_dof, trunc, field)], trunc, h_trunc)

    @classmethod
    def monomial(
        cls,
        h_power: int,
        exp: Exponent,
        coeff: Any,
        n_dof: int,
        trunc: int,
        h_trunc: int,
        field: Field | None = None,
    ) -> HJet:
        f = field or default_field()
        layers = [Jet.zero(n_dof, layer_trunc(trunc, j), f) for j in range(h_trunc + 1)]
        if h_power <= h_trunc:
            layers[h_power] = Jet(n_dof, layer_trunc(trunc, h_power), {tuple(exp): coeff}, f)
        return cls(layers, trunc, h_trunc)

    @classmethod
    def h(cls, n_dof: int, trunc: int, h_trunc: int, field: Field | None = None) -> HJet:
        return cls.monomial(1, (0,) * (2 * n_dof), 1, n_dof, trunc, h_trunc, field)

    # ── Access ──

    def layer(self, j: int) -> Jet:
        if j <= self.h_trunc:
            return self.layers[j]
        return Jet.zero(self.n_dof, -1, self.field)

    @property
    def terms(self) -> dict[tuple[int, Exponent], Any]:
        return {(j, e): c for j, layer in enumerate(self.layers) for e, c in layer.terms.items()}

    def constant_term(self) -> Any:
        return self.layers[0].constant_term()

    def truncate(self, trunc: int, h_trunc: int) -> HJet:
        return HJet(list(self.layers[: h_trunc + 1]), trunc, h_trunc)

    def map_layers(self, fn: Callable[[Jet], Jet]) -> HJet:
        return HJet([fn(layer) for layer in self.layers], self.trunc, self.h_trunc)

    # ── Compatibility ──

    def _check(self, other: HJet) -> tuple[int, int]:
        if self.n_dof != other.n_dof:
            raise JetShapeError(
                "mismatched number of degrees of freedom", left=self.n_dof, right=other.n_dof
            )
        if self.field.name != other.field.name:
            raise FieldError("mixed coefficient fields in one computation")
        return min(self.trunc, other.trunc), min(self.h_trunc, other.h_trunc)

    def _lift(self, other: Any) -> HJet:
        if isinstance(other, HJet):
            return other
        if isinstance(other, Jet):
            return HJet.from_jet(other, self.trunc, self.h_trunc)
        return HJet.constant(other, self.n_dof, self.trunc, self.h_trunc, self.field)

    # ── Pointwise algebra ──

    def __add__(self, other: Any) -> HJet:
        o = self._lift(other)
        N, M = self._check(o)
        return HJet([self.layer(j) + o.layer(j) for j in range(M + 1)], N, M)

    def __radd__(self, other: Any) -> HJet:
        return self + other

    def __neg__(self) -> HJet:
        return self.map_layers(lambda a: -a)

    def __sub__(self, other: Any) -> HJet:
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> HJet:
        return (-self) + other

    def scale(self, value: Any) -> HJet:
        return self.map_layers(lambda a: a.scale(value))

    def __mul__(self, other: Any) -> HJet:
        if not isinstance(other, HJet | Jet):
            return self.scale(other)
        o = self._lift(other)
        N, M = self._check(o)
        layers = []
        for k in range(M + 1):
            acc = Jet.zero(self.n_dof, layer_trunc(N, k), self.field)
            for i in range(k + 1):
                acc = acc + (self.layer(i) * o.layer(k - i)).truncate(layer_trunc(N, k))
            layers.append(acc)
        return HJet(layers, N, M)

    def __rmul__(self, other: Any) -> HJet:
        return self.scale(other)

    def h_shift(self, k: int = 1) -> HJet:
        """Multiply by h^k."""
        zero = Jet.zero(self.n_dof, self.trunc, self.field)
        return HJet([zero] * k + list(self.layers), self.trunc, self.h_trunc)

    def h_divide(self) -> HJet:
        """Divide by h; requires a vanishing h⁰ layer. Result lives at (N−2, M−1)."""
        if not self.layers[0].is_zero():
            raise PreconditionError("h⁰ layer must vanish before dividing by h")
        if self.h_trunc == 0:
            return HJet.zero(self.n_dof, self.trunc - 2, 0, self.field)
        return HJet(list(self.layers[1:]), self.trunc - 2, self.h_trunc - 1)

    def inverse(self) -> HJet:
        """Pointwise inverse of an elliptic h-jet."""
        c = self.constant_term()
        if self.field.is_zero(c):
            raise PreconditionError("h-jet is not elliptic: a₀(0) = 0")
        inv_c = self.field.one / c
        x = self.scale(inv_c) - 1
        coeffs = [(-1) ** k for k in range(self.trunc + 1)]
        return power_series(x, coeffs, HJet.__mul__).scale(inv_c)

    def log(self, winding: int = 0) -> HJet:
        c = self.constant_term()
        if self.field.is_zero(c):
            raise PreconditionError("h-jet is not elliptic: a₀(0) = 0")
        x = self.scale(self.field.one / c) - 1
        coeffs = [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, self.trunc + 1)]
        return power_series(x, coeffs, HJet.__mul__) + self.field.log(c, winding)

    def exp(self) -> HJet:
        c = self.constant_term()
        x = self - c
        coeffs = [Fraction(1, factorial(k)) for k in range(self.trunc + 1)]
        return power_series(x, coeffs, HJet.__mul__).scale(self.field.exp(c))

    # ── Predicates / conversions ──

    def conj(self) -> HJet:
        return self.map_layers(Jet.conj)

    def real_part(self) -> HJet:
        return self.map_layers(Jet.real_part)

    def imag_part(self) -> HJet:
        return self.map_layers(Jet.imag_part)

    def chop(self, tol: float | None = None) -> HJet:
        return self.map_layers(lambda a: a.chop(tol))

    def as_field(self, field: Field) -> HJet:
        return self.map_layers(lambda a: a.as_field(field))

    def max_abs(self) -> float:
        return max(layer.max_abs() for layer in self.layers)

    def is_zero(self, tol: float | None = None) -> bool:
        return all(layer.is_zero(tol) for layer in self.layers)

    def is_real(self, tol: float | None = None) -> bool:
        return all(layer.is_real(tol) for layer in self.layers)

    def allclose(self, other: HJet, tol: float | None = None) -> bool:
        return (self - other).is_zero(tol)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HJet):
            return NotImplemented
        return self.layers == other.layers

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join(f"h^{j}: {layer!r}" for j, layer in enumerate(self.layers))
        return f"HJet(N={self.trunc}, M={self.h_trunc}; {body})"


def power_series(
    x: HJet, coeffs: Sequence[Any], product: Callable[[HJet, HJet], HJet]
) -> HJet:
    """Σ coeffs[k] x^k for x of positive weight (the sum terminates)."""
    out = HJet.constant(0, x.n_dof, x.trunc, x.h_trunc, x.field)
    power = HJet.constant(1, x.n_dof, x.trunc, x.h_trunc, x.field)
    for k, c in enumerate(coeffs):
        if k:
            power = product(power, x)
            if power.is_zero(0.0 if not x.field.exact else None):
                break
        if c:
            out = out + power.scale(c)
    return out

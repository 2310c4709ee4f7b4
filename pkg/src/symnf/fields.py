"""
Coefficient fields for jets.

Two instantiations are provided. ``ExactField`` works over the Gaussian
rationals Q[i] (the Moyal constant h/2i and the complexifying coordinates
of the normal form both need i). It never evaluates a transcendental
function at a nontrivial argument. ``FloatField`` works over complex
doubles with a fixed tolerance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Any

from .errors import FieldError

# ── Gaussian rationals ──


@dataclass(frozen=True, slots=True, eq=False)
class GaussianRational:
    re: Fraction = field(default_factory=Fraction)
    im: Fraction = field(default_factory=Fraction)

    @classmethod
    def lift(cls, value: Any) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, bool):
            return cls(Fraction(int(value)))
        if isinstance(value, int | Rational):
            return cls(Fraction(value))
        raise FieldError(f"cannot represent {value!r} exactly", value=repr(value))

    def _other(self, other: Any) -> GaussianRational | None:
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, int | Rational):
            return GaussianRational(Fraction(other))
        return None

    def __add__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return GaussianRational(self.re * o.re)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("division by exact zero")
            return GaussianRational(self.re / o.re, self.im / o.re)
        d = o.re * o.re + o.im * o.im
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, other: Any) -> GaussianRational:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __pos__(self) -> GaussianRational:
        return self

    def __pow__(self, k: int) -> GaussianRational:
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else GaussianRational(Fraction(1)) / self
        out = GaussianRational(Fraction(1))
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other: object) -> bool:
        o = self._other(other)
        if o is None:
            if isinstance(other, complex | float):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def __repr__(self) -> str:
        if not self.im:
            return f"{self.re}"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


@dataclass(frozen=True)
class LatticeValue:
    """a + 2πi·q with a Gaussian rational and q rational."""

    a: GaussianRational
    q: Fraction = Fraction(0)

    @classmethod
    def lift(cls, value: Any) -> LatticeValue:
        if isinstance(value, LatticeValue):
            return value
        return cls(GaussianRational.lift(value))

    def __add__(self, other: LatticeValue) -> LatticeValue:
        return LatticeValue(self.a + other.a, self.q + other.q)

    def __neg__(self) -> LatticeValue:
        return LatticeValue(-self.a, -self.q)

    def __rmul__(self, k: int) -> LatticeValue:
        return LatticeValue(self.a * k, self.q * k)

    __mul__ = __rmul__

    def conjugate(self) -> LatticeValue:
        return LatticeValue(self.a.conjugate(), -self.q)

    def is_zero(self) -> bool:
        return not self.a and not self.q

    def lattice_index(self) -> int | None:
        # π is transcendental: a + 2πiq ∈ 2πiℤ iff a = 0 and q ∈ ℤ
        if self.a or self.q.denominator != 1:
            return None
        return int(self.q)

    def __complex__(self) -> complex:
        return complex(self.a) + 2j * math.pi * float(self.q)


# ── Fields ──


class ExactField:
    """Gaussian rationals; transcendental functions only at trivial points."""

    name = "exact"
    exact = True

    def __init__(self, tol: float = 0.0) -> None:
        self.tol = 0.0

    @property
    def zero(self) -> GaussianRational:
        return _ZERO

    @property
    def one(self) -> GaussianRational:
        return _ONE

    @property
    def i(self) -> GaussianRational:
        return _I

    def coerce(self, value: Any) -> GaussianRational:
        if isinstance(value, float | complex):
            raise FieldError("float value in exact computation", value=repr(value))
        return GaussianRational.lift(value)

    def rational(
        self, num: int, den: int = 1, im_num: int = 0, im_den: int = 1
    ) -> GaussianRational:
        return GaussianRational(Fraction(num, den), Fraction(im_num, im_den))

    def is_zero(self, value: Any, tol: float | None = None) -> bool:
        return not value

    def is_real(self, value: Any, tol: float | None = None) -> bool:
        return not GaussianRational.lift(value).im

    def conj(self, value: Any) -> GaussianRational:
        return GaussianRational.lift(value).conjugate()

    def real(self, value: Any) -> GaussianRational:
        return GaussianRational(GaussianRational.lift(value).re)

    def imag(self, value: Any) -> GaussianRational:
        return GaussianRational(GaussianRational.lift(value).im)

    def to_complex(self, value: Any) -> complex:
        return complex(value)

    def exp(self, value: Any) -> GaussianRational:
        if not value:
            return _ONE
        raise FieldError("exp of a nonzero value is not exact", value=repr(value))

    def log(self, value: Any, winding: int = 0) -> GaussianRational:
        if value == _ONE and winding == 0:
            return _ZERO
        raise FieldError("log is exact only at 1 on the principal branch", value=repr(value))

    def phi1(self, value: Any) -> GaussianRational:
        if not value:
            return _ONE
        raise FieldError("(e^z-1)/z of a nonzero value is not exact", value=repr(value))

    def lattice_index(self, value: Any) -> int | None:
        # 2πik is rational only for k = 0
        return 0 if not value else None

    def __repr__(self) -> str:
        return "ExactField()"


class FloatField:
    """Complex doubles with an absolute tolerance for zero tests."""

    name = "float"
    exact = False

    def __init__(self, tol: float = 1e-9) -> None:
        self.tol = tol

    @property
    def zero(self) -> complex:
        return 0j

    @property
    def one(self) -> complex:
        return 1 + 0j

    @property
    def i(self) -> complex:
        return 1j

    def coerce(self, value: Any) -> complex:
        return complex(value)

    def is_zero(self, value: Any, tol: float | None = None) -> bool:
        return abs(value) <= (self.tol if tol is None else tol)

    def is_real(self, value: Any, tol: float | None = None) -> bool:
        return abs(complex(value).imag) <= (self.tol if tol is None else tol)

    def conj(self, value: Any) -> complex:
        return complex(value).conjugate()

    def real(self, value: Any) -> complex:
        return complex(complex(value).real)

    def imag(self, value: Any) -> complex:
        return complex(complex(value).imag)

    def to_complex(self, value: Any) -> complex:
        return complex(value)

    def exp(self, value: Any) -> complex:
        return cmath.exp(value)

    def log(self, value: Any, winding: int = 0) -> complex:
        if value == 0:
            raise FieldError("log of zero")
        return cmath.log(value) + 2j * math.pi * winding

    def phi1(self, value: Any) -> complex:
        z = complex(value)
        if z == 0:
            return 1 + 0j
        if abs(z) < 1e-3:
            return 1 + z / 2 + z * z / 6 + z**3 / 24 + z**4 / 120
        return (cmath.exp(z) - 1) / z

    def lattice_index(self, value: Any) -> int | None:
        z = complex(value)
        k = round(z.imag / (2 * math.pi))
        if abs(z - 2j * math.pi * k) <= self.tol * max(1.0, abs(z)):
            return k
        return None

    def __repr__(self) -> str:
        return f"FloatField(tol={self.tol})"


_ZERO = GaussianRational(Fraction(0))
_ONE = GaussianRational(Fraction(1))
_I = GaussianRational(Fraction(0), Fraction(1))

Field = ExactField | FloatField


@lru_cache(maxsize=16)
def get_field(name: str = "float", tol: float = 1e-9) -> Field:
    if name == "exact":
        return ExactField()
    if name == "float":
        return FloatField(tol)
    raise FieldError(f"unknown coefficient field {name!r}", field=name)

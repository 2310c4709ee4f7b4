"""Protocol definitions — coefficient fields and the vectors graded operators act on."""

from __future__ import annotations

from typing import Any, Protocol, runtime_checkable


@runtime_checkable
class CoefficientField(Protocol):
    name: str
    exact: bool
    tol: float

    @property
    def zero(self) -> Any: ...
    @property
    def one(self) -> Any: ...
    @property
    def i(self) -> Any: ...

    def coerce(self, value: Any) -> Any: ...
    def is_zero(self, value: Any, tol: float | None = None) -> bool: ...
    def is_real(self, value: Any, tol: float | None = None) -> bool: ...
    def conj(self, value: Any) -> Any: ...
    def real(self, value: Any) -> Any: ...
    def imag(self, value: Any) -> Any: ...
    def to_complex(self, value: Any) -> complex: ...
    def exp(self, value: Any) -> Any: ...
    def log(self, value: Any, winding: int = 0) -> Any: ...
    def phi1(self, value: Any) -> Any: ...
    def lattice_index(self, value: Any) -> int | None: ...


@runtime_checkable
class GradedVector(Protocol):
    """What ``GradedOperator`` needs from the elements it acts on (jets, h-jets)."""

    def __add__(self, other: Any) -> Any: ...
    def scale(self, value: Any) -> Any: ...
    def is_zero(self, tol: float | None = None) -> bool: ...

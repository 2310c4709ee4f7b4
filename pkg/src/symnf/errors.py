"""
Error hierarchy — every failure carries the pipeline stage and a JSON-ready payload.
"""

from __future__ import annotations

from typing import Any


class NormalFormError(Exception):
    """Base class for all symnf failures."""

    code = "normal_form_error"

    def __init__(self, message: str, *, stage: str | None = None, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.stage = stage
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.stage is not None:
            payload["stage"] = self.stage
        if self.details:
            payload["details"] = self.details
        return payload


# ── Preconditions ──


class PreconditionError(NormalFormError, ValueError):
    code = "precondition"


class JetShapeError(PreconditionError):
    """Mismatched n_dof, truncation order or malformed exponent."""

    code = "jet_shape"


class FieldError(PreconditionError):
    """Operation not representable in the coefficient field, or mixed fields."""

    code = "field"


class NegativeEigenvalueError(PreconditionError):
    """Linear part has an eigenvalue on the closed negative real axis."""

    code = "negative_eigenvalue"


class SpectralError(PreconditionError):
    """Eigenvalue cluster cannot be resolved in floating point."""

    code = "spectral"


# ── Resonances ──


class ResonanceError(NormalFormError, ArithmeticError):
    """An integer combination of the exponents hits the forbidden lattice."""

    code = "resonance"

    def __init__(
        self,
        message: str,
        *,
        k: list[int] | tuple[int, ...],
        degree: int | None = None,
        value: complex | None = None,
        condition: str | None = None,
        stage: str | None = None,
    ) -> None:
        details: dict[str, Any] = {"k": list(k)}
        if degree is not None:
            details["degree"] = degree
        if value is not None:
            details["value"] = [float(complex(value).real), float(complex(value).imag)]
        if condition is not None:
            details["condition"] = condition
        super().__init__(message, stage=stage, **details)
        self.k = tuple(k)
        self.degree = degree
        self.value = value
        self.condition = condition


# ── I/O ──


class SchemaError(NormalFormError):
    """Input payload does not match the wire schema."""

    code = "schema"

    def __init__(self, message: str, *, pointer: str = "", stage: str | None = None) -> None:
        super().__init__(message, stage=stage, pointer=pointer)
        self.pointer = pointer

"""
Wire codec — pydantic payloads to jets, matrices and formal FIOs, and back.

Exact scalars travel as rational pairs, float scalars as {re, im}. Output
ordering is fixed (graded exponent order) so identical results serialize
identically.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from typing import Any, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from .birkhoff import ActionExpression, QuadraticNormalForm
from .errors import FieldError, SchemaError
from .fields import ExactField, Field, GaussianRational, LatticeValue
from .jetcalc import HJet, Jet, MapJet
from .jetcalc.matrices import as_matrix
from .jetcalc.monomials import Exponent, graded_key
from .models import (
    ExactScalar,
    FloatScalar,
    FormalFIOModel,
    HJetModel,
    JetModel,
    LatticeScalar,
    MapJetModel,
    MatrixModel,
    ResonanceInput,
    Term,
)
from .symlin import ExactCluster
from .weylq import FormalFIO

M = TypeVar("M", bound=BaseModel)

_EXACT = ExactField()


def pointer(loc: Sequence[int | str]) -> str:
    """JSON pointer for a pydantic error location."""
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in loc)


def parse(model: type[M], payload: Any, *, prefix: Sequence[int | str] = ()) -> M:
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = [*prefix, *first["loc"]]
        raise SchemaError(first["msg"], pointer=pointer(loc)) from exc


# ── Scalars ──


def _exact(num: int, den: int, im_num: int, im_den: int) -> GaussianRational:
    return GaussianRational(Fraction(num, den), Fraction(im_num, im_den))


def decode_scalar(value: Any, f: Field) -> Any:
    if isinstance(value, ExactScalar):
        g = _exact(value.num, value.den, value.im_num, value.im_den)
        return g if f.exact else complex(g)
    if isinstance(value, FloatScalar):
        if f.exact:
            raise FieldError("float value in exact computation", value=[value.re, value.im])
        return complex(value.re, value.im)
    return f.coerce(value)


def decode_term(term: Term, f: Field) -> Any:
    if term.is_exact:
        g = _exact(term.num or 0, term.den or 1, term.im_num or 0, term.im_den or 1)
        return g if f.exact else complex(g)
    if f.exact:
        raise FieldError("float term in exact computation", exp=term.exp)
    return complex(term.re or 0.0, term.im or 0.0)


def encode_scalar(value: Any, f: Field) -> dict[str, Any]:
    if f.exact:
        g = GaussianRational.lift(value)
        out: dict[str, Any] = {"num": g.re.numerator, "den": g.re.denominator}
        if g.im:
            out["im_num"] = g.im.numerator
            out["im_den"] = g.im.denominator
        return out
    z = complex(value)
    return {"re": z.real, "im": z.imag}


def _encode_terms(items: Sequence[tuple[Exponent, Any]], f: Field) -> list[dict[str, Any]]:
    ordered = sorted(items, key=lambda kv: graded_key(kv[0]))
    return [{"exp": list(e), **encode_scalar(c, f)} for e, c in ordered]


def _decode_terms(terms: Sequence[Term], f: Field) -> list[tuple[Exponent, Any]]:
    return [(tuple(t.exp), decode_term(t, f)) for t in terms]


# ── Jets ──


def check_terms(
    terms: Sequence[Term], n: int, trunc: int, at: Sequence[int | str], *, weight: int = 0
) -> None:
    """Every exponent has 2n entries and degree + weight ≤ trunc."""
    for i, t in enumerate(terms):
        if len(t.exp) != 2 * n:
            raise SchemaError(
                f"exponent needs {2 * n} entries, got {len(t.exp)}",
                pointer=pointer([*at, i, "exp"]),
            )
        if sum(t.exp) + weight > trunc:
            raise SchemaError(
                f"term of weight {sum(t.exp) + weight} exceeds trunc {trunc}",
                pointer=pointer([*at, i, "exp"]),
            )


def decode_jet(model: JetModel, f: Field, at: Sequence[int | str] = ()) -> Jet:
    check_terms(model.terms, model.n, model.trunc, [*at, "terms"])
    return Jet(model.n, model.trunc, _decode_terms(model.terms, f), f)


def encode_jet(jet: Jet) -> dict[str, Any]:
    return {
        "schema_version": 1,
        "n": jet.n_dof,
        "trunc": jet.trunc,
        "terms": _encode_terms(jet.items(), jet.field),
    }


def decode_hjet(model: HJetModel, f: Field, at: Sequence[int | str] = ()) -> HJet:
    if len(model.layers) > model.h_trunc + 1:
        raise SchemaError(
            f"h-jet has {len(model.layers)} layers, h_trunc allows {model.h_trunc + 1}",
            pointer=pointer([*at, "layers"]),
        )
    for j, layer in enumerate(model.layers):
        check_terms(layer, model.n, model.trunc, [*at, "layers", j], weight=2 * j)
    layers = [dict(_decode_terms(layer, f)) for layer in model.layers]
    return HJet.from_terms(layers, model.n, model.trunc, model.h_trunc, f)


def encode_hjet(a: HJet) -> dict[str, Any]:
    return {
        "schema_version": 1,
        "n": a.n_dof,
        "trunc": a.trunc,
        "h_trunc": a.h_trunc,
        "layers": [_encode_terms(layer.items(), a.field) for layer in a.layers],
    }


def decode_mapjet(model: MapJetModel, f: Field, at: Sequence[int | str] = ()) -> MapJet:
    if len(model.components) != 2 * model.n:
        raise SchemaError("map jet needs 2n components", pointer=pointer([*at, "components"]))
    for c, comp in enumerate(model.components):
        check_terms(comp, model.n, model.trunc, [*at, "components", c])
    comps = [Jet(model.n, model.trunc, _decode_terms(c, f), f) for c in model.components]
    return MapJet(comps, model.trunc)


def encode_mapjet(m: MapJet) -> dict[str, Any]:
    return {
        "schema_version": 1,
        "n": m.n_dof,
        "trunc": m.trunc,
        "components": [_encode_terms(c.items(), m.field) for c in m.components],
    }


# ── Matrices ──


def decode_matrix(model: MatrixModel, f: Field) -> np.ndarray:
    rows = model.rows
    if not rows or any(len(r) != len(rows) for r in rows):
        raise SchemaError("matrix must be square and nonempty", pointer=pointer(["rows"]))
    return as_matrix([[decode_scalar(v, f) for v in row] for row in rows], f)


def decode_spectrum(model: MatrixModel, f: Field) -> list[ExactCluster] | None:
    if model.spectrum is None:
        return None
    if not f.exact:
        raise FieldError("exact spectral data needs the exact field")
    return [
        ExactCluster(
            eigenvalue=GaussianRational.lift(decode_scalar(c.eigenvalue, f)),
            mu=(
                decode_lattice(c.mu)
                if isinstance(c.mu, LatticeScalar)
                else GaussianRational.lift(decode_scalar(c.mu, f))
            ),
            basis=[[decode_scalar(v, f) for v in col] for col in c.basis],
        )
        for c in model.spectrum
    ]


def encode_matrix(m: Any, f: Field) -> list[list[dict[str, Any]]]:
    a = np.asarray(m, dtype=object)
    if not f.exact:
        return [[encode_scalar(_real_if_close(v), f) for v in row] for row in a]
    return [[encode_scalar(v, f) for v in row] for row in a]


def _real_if_close(v: Any) -> complex:
    z = complex(v)
    return complex(z.real, 0.0) if abs(z.imag) < 1e-15 else z


# ── Composite inputs ──


def decode_fio(model: FormalFIOModel, f: Field) -> FormalFIO:
    return FormalFIO(
        amp=decode_hjet(model.amp, f, ["amp"]),
        p_ref=decode_jet(model.p_ref, f, ["p_ref"]) if model.p_ref is not None else None,
        gauge=model.gauge,
        kappa=decode_mapjet(model.kappa, f, ["kappa"]) if model.kappa is not None else None,
    )


def decode_lattice(v: LatticeScalar) -> LatticeValue:
    a = _exact(v.a.num, v.a.den, v.a.im_num, v.a.im_den)
    return LatticeValue(a, Fraction(v.q_num, v.q_den))


def encode_lattice(value: LatticeValue) -> dict[str, Any]:
    q = value.q
    return {
        "a": encode_scalar(value.a, _EXACT),
        "q_num": q.numerator,
        "q_den": q.denominator,
    }


def decode_mus(model: ResonanceInput) -> list[Any]:
    """Exponents μ_j: exact lattice values when every entry is exact, else complex."""

    def exact(v: Any) -> LatticeValue | None:
        if isinstance(v, LatticeScalar):
            return decode_lattice(v)
        if isinstance(v, ExactScalar):
            return LatticeValue(_exact(v.num, v.den, v.im_num, v.im_den))
        if isinstance(v, int) and not isinstance(v, bool):
            return LatticeValue.lift(v)
        return None

    lifted = [exact(v) for v in model.mus]
    if all(v is not None for v in lifted):
        return lifted
    out: list[Any] = []
    for v, lv in zip(model.mus, lifted, strict=True):
        if lv is not None:
            out.append(complex(lv))
        elif isinstance(v, FloatScalar):
            out.append(complex(v.re, v.im))
        else:
            out.append(complex(v))
    return out


# ── Normal forms ──


def encode_qnf(q: QuadraticNormalForm, f: Field) -> dict[str, Any]:
    def scalars(values: Sequence[Any]) -> list[dict[str, Any]]:
        return [encode_scalar(v, f) for v in values]

    return {
        "n_loxodromic": q.n_hc,
        "n_hyperbolic": q.n_hr,
        "n_elliptic": q.n_e,
        "alphas": scalars(q.alphas),
        "betas": scalars(q.betas),
        "mus": scalars(q.mus),
        "nus": scalars(q.nus),
    }


def encode_actions(expr: ActionExpression) -> dict[str, Any]:
    """F(ι; h) as one list of action monomials per h-order."""
    layers = [_encode_terms(F.items(), F.field) for F in expr.layers]
    return {"trunc": expr.trunc, "h_trunc": expr.h_trunc, "layers": layers}

"""
Weyl-symbol composition on h-jets.

    a # b = Σ_k (1/k!) (h/2i)^k (σ(D_ρ; D_ρ'))^k a(ρ) b(ρ') |_{ρ'=ρ}

so that a # b − b # a = (h/i){a, b} + O(h³) and x # ξ − ξ # x = ih.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Any

from ..errors import PreconditionError
from ..jetcalc import HJet, power_series
from ..jetcalc.monomials import Exponent, falling, multi_factorial


@lru_cache(maxsize=65536)
def _contractions(ea: Exponent, eb: Exponent) -> tuple[tuple[Exponent, int, Fraction], ...]:
    """(monomial, order k, rational factor) for x^ea ξ.. # x^eb ξ.. before (1/2i)^k."""
    n = len(ea) // 2
    g_max = [min(ea[n + j], eb[j]) for j in range(n)]
    d_max = [min(ea[j], eb[n + j]) for j in range(n)]
    out = []
    for gamma in product(*(range(g + 1) for g in g_max)):
        for delta in product(*(range(d + 1) for d in d_max)):
            c = Fraction(1, multi_factorial(gamma) * multi_factorial(delta))
            for j in range(n):
                c *= falling(ea[n + j], gamma[j]) * falling(ea[j], delta[j])
                c *= falling(eb[j], gamma[j]) * falling(eb[n + j], delta[j])
            if sum(delta) % 2:
                c = -c
            e = [0] * (2 * n)
            for j in range(n):
                e[j] = ea[j] - delta[j] + eb[j] - gamma[j]
                e[n + j] = ea[n + j] - gamma[j] + eb[n + j] - delta[j]
            out.append((tuple(e), sum(gamma) + sum(delta), c))
    return tuple(out)


def moyal(a: HJet, b: HJet, trunc: int | None = None, h_trunc: int | None = None) -> HJet:
    """a # b up to weight ``trunc`` and h-order ``h_trunc``."""
    N, M = a._check(b)
    if trunc is not None:
        if trunc > N:
            raise PreconditionError("requested truncation exceeds the operands'", trunc=trunc)
        N = trunc
    if h_trunc is not None:
        if h_trunc > M:
            raise PreconditionError("requested h truncation exceeds the operands'", h_trunc=h_trunc)
        M = h_trunc
    f = a.field
    unit = f.one / (f.i * 2)
    scale = [unit**k for k in range(N + 1)]
    layers: list[dict[Exponent, Any]] = [{} for _ in range(M + 1)]
    for i, la in enumerate(a.layers[: M + 1]):
        for l_, lb in enumerate(b.layers[: M + 1 - i]):
            base = i + l_
            for ea, ca in la.terms.items():
                wa = sum(ea) + 2 * i
                for eb, cb in lb.terms.items():
                    if wa + sum(eb) + 2 * l_ > N:
                        continue
                    cab = ca * cb
                    for e, k, c in _contractions(ea, eb):
                        j = base + k
                        if j > M:
                            continue
                        v = cab * scale[k] * f.coerce(c)
                        bucket = layers[j]
                        bucket[e] = bucket[e] + v if e in bucket else v
    return HJet.from_terms(layers, a.n_dof, N, M, f)


def commutator(a: HJet, b: HJet) -> HJet:
    return moyal(a, b) - moyal(b, a)


def quantum_bracket(p: HJet, y: HJet) -> HJet:
    """(i/h)[p, y] at y's truncation.

    p is read as an exact symbol at weight N+2 and h-order M+1 (padded
    with zeros), which is exactly what the bracket consumes at (N, M).
    """
    N, M = y.trunc, y.h_trunc
    f = y.field
    pl = HJet(list(p.layers), N + 2, M + 1)
    yl = HJet(list(y.layers), N + 2, M + 1)
    c = commutator(pl, yl)
    return c.h_divide().truncate(N, M).scale(f.i)


def star_pow(a: HJet, k: int) -> HJet:
    if k < 0:
        return star_pow(star_inverse(a), -k)
    out = HJet.constant(1, a.n_dof, a.trunc, a.h_trunc, a.field)
    for _ in range(k):
        out = moyal(out, a)
    return out


def star_exp(a: HJet) -> HJet:
    c = a.constant_term()
    x = a - c
    coeffs = [Fraction(1, factorial(k)) for k in range(a.trunc + 1)]
    return power_series(x, coeffs, moyal).scale(a.field.exp(c))


def star_log(a: HJet, winding: int = 0) -> HJet:
    """#-logarithm of an elliptic symbol; ``winding`` picks the branch of log a₀(0)."""
    f = a.field
    c = a.constant_term()
    if f.is_zero(c):
        raise PreconditionError("symbol is not elliptic: a₀(0) = 0")
    x = a.scale(f.one / c) - 1
    coeffs = [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, a.trunc + 1)]
    return power_series(x, coeffs, moyal) + f.log(c, winding)


def star_inverse(a: HJet) -> HJet:
    f = a.field
    c = a.constant_term()
    if f.is_zero(c):
        raise PreconditionError("symbol is not elliptic: a₀(0) = 0")
    inv_c = f.one / c
    x = a.scale(inv_c) - 1
    coeffs = [(-1) ** k for k in range(a.trunc + 1)]
    return power_series(x, coeffs, moyal).scale(inv_c)

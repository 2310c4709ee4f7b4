"""Exponent-vector helpers in 2n phase-space variables (x₁..x_n, ξ₁..ξ_n)."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial, prod

Exponent = tuple[int, ...]


def graded_key(e: Exponent) -> tuple[int, tuple[int, ...]]:
    """Graded-lex sort key: total degree, then lexicographic with x₁ first."""
    return sum(e), tuple(-v for v in e)


@lru_cache(maxsize=512)
def monomials_of_degree(nvars: int, degree: int) -> tuple[Exponent, ...]:
    out: list[Exponent] = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return tuple(sorted(out, key=graded_key))


def monomials_up_to(nvars: int, lo: int, hi: int) -> tuple[Exponent, ...]:
    return tuple(m for d in range(lo, hi + 1) for m in monomials_of_degree(nvars, d))


def unit(nvars: int, j: int, power: int = 1) -> Exponent:
    e = [0] * nvars
    e[j] = power
    return tuple(e)


def add(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def falling(m: int, k: int) -> int:
    """m (m-1) ... (m-k+1)."""
    out = 1
    for i in range(k):
        out *= m - i
    return out


def multi_factorial(e: Exponent) -> int:
    return prod(factorial(v) for v in e)


def split(e: Exponent) -> tuple[Exponent, Exponent]:
    """(α, β): the x and ξ halves of a phase-space exponent."""
    n = len(e) // 2
    return e[:n], e[n:]


def format_monomial(e: Exponent) -> str:
    n = len(e) // 2
    names = [f"x{i + 1}" for i in range(n)] + [f"ξ{i + 1}" for i in range(n)]
    parts = [name if p == 1 else f"{name}^{p}" for name, p in zip(names, e, strict=True) if p]
    return "*".join(parts) or "1"

"""Shared test fixtures — coefficient fields, coordinate jets, seeded randomness."""

from __future__ import annotations

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from symnf.fields import get_field
from symnf.jetcalc import HJet, Jet
from symnf.jetcalc.monomials import monomials_up_to


@pytest.fixture
def exact():
    return get_field("exact")


@pytest.fixture
def fl():
    return get_field("float", 1e-9)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


def coords(n: int, trunc: int, field) -> tuple[list[Jet], list[Jet]]:
    """(x_1..x_n, ξ_1..ξ_n) as jets."""
    return (
        [Jet.x(i, n, trunc, field) for i in range(n)],
        [Jet.xi(i, n, trunc, field) for i in range(n)],
    )


def random_jet(rng: random.Random, n: int, lo: int, hi: int, trunc: int, field) -> Jet:
    """Sparse jet with small rational coefficients in degrees lo..hi."""
    terms = {}
    for e in monomials_up_to(2 * n, lo, hi):
        if rng.random() < 0.4:
            terms[e] = Fraction(rng.randint(-3, 3), rng.randint(1, 4))
    return Jet(n, trunc, terms, field)


def random_hjet(rng: random.Random, n: int, trunc: int, h_trunc: int, field) -> HJet:
    layers = [
        random_jet(rng, n, 0, max(trunc - 2 * j, 0), max(trunc - 2 * j, 0), field)
        for j in range(h_trunc + 1)
    ]
    return HJet(layers, trunc, h_trunc)

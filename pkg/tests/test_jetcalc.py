"""Jet algebra — Poisson brackets, maps, flows and graded operators."""

from __future__ import annotations

from fractions import Fraction

import pytest
from conftest import coords, random_jet

from symnf.errors import FieldError, JetShapeError, PreconditionError
from symnf.fields import GaussianRational
from symnf.interfaces import CoefficientField, GradedVector
from symnf.jetcalc import (
    HJet,
    Jet,
    MapJet,
    bernoulli,
    compose,
    flow_jet,
    hamilton_field,
    lie_operator,
    poisson,
)

# ── Jets ──


class TestJet:
    def test_truncation_drops_high_degrees(self, exact):
        a = Jet(1, 2, {(3, 0): 1, (1, 1): 2}, exact)
        assert a.terms == {(1, 1): 2}

    def test_bad_exponent_rejected(self, exact):
        with pytest.raises(JetShapeError):
            Jet(1, 3, {(1, 0, 0): 1}, exact)

    def test_equality_ignores_trunc(self, exact):
        assert Jet.x(0, 1, 2, exact) == Jet.x(0, 1, 5, exact)

    def test_product_respects_trunc(self, exact):
        (x,), (xi,) = coords(1, 3, exact)
        assert (x * x * xi * xi).is_zero()
        assert (x * x * xi).coeff((2, 1)) == 1

    def test_mixed_fields_rejected(self, exact, fl):
        with pytest.raises(FieldError):
            Jet.x(0, 1, 2, exact) + Jet.x(0, 1, 2, fl)

    def test_gaussian_coefficients(self, exact):
        a = Jet.constant(exact.i, 1, 0, exact)
        assert (a * a).constant_term() == -1
        assert a.constant_term() == GaussianRational(Fraction(0), Fraction(1))


# ── Poisson bracket ──


class TestPoisson:
    def test_canonical_pair(self, exact):
        (x,), (xi,) = coords(1, 3, exact)
        assert poisson(xi, x).constant_term() == 1
        assert poisson(x, xi).constant_term() == -1

    def test_hamilton_field(self, exact):
        (x,), (xi,) = coords(1, 3, exact)
        X, XI = hamilton_field(x * xi)
        assert X == x
        assert XI == -xi

    def test_antisymmetric(self, exact, rng):
        a = random_jet(rng, 2, 2, 4, 4, exact)
        b = random_jet(rng, 2, 2, 4, 4, exact)
        assert poisson(a, b) == -poisson(b, a)

    def test_jacobi_identity(self, exact, rng):
        a, b, c = (random_jet(rng, 1, 2, 3, 5, exact) for _ in range(3))
        total = (
            poisson(a, poisson(b, c))
            + poisson(b, poisson(c, a))
            + poisson(c, poisson(a, b))
        )
        assert total.truncate(3).is_zero()

    def test_leibniz_rule(self, exact, rng):
        """{a, bc} = {a, b}c + b{a, c} for a vanishing to second order."""
        a = random_jet(rng, 2, 2, 4, 4, exact)
        b, c = (random_jet(rng, 2, 1, 3, 4, exact) for _ in range(2))
        lhs = poisson(a, b * c)
        rhs = poisson(a, b) * c + b * poisson(a, c)
        assert lhs.truncate(4) == rhs.truncate(4)


# ── Map jets and flows ──


class TestFlow:
    def test_cubic_shear(self, exact):
        (x,), (xi,) = coords(1, 2, exact)
        p = Jet(1, 3, {(0, 3): Fraction(1, 3)}, exact)
        kappa = flow_jet(p, 1, 2)
        assert kappa == MapJet([x + xi * xi, xi], 2)
        assert kappa.inverse() == MapJet([x - xi * xi, xi], 2)

    def test_inverse_composes_to_identity(self, exact, rng):
        p = random_jet(rng, 2, 3, 5, 5, exact)
        kappa = flow_jet(p, 1, 4)
        ident = MapJet.identity(2, 4, exact)
        assert kappa.compose(kappa.inverse()) == ident
        assert kappa.inverse().compose(kappa) == ident

    def test_flow_is_symplectic(self, exact, rng):
        p = random_jet(rng, 2, 3, 4, 4, exact)
        assert flow_jet(p, 1, 3).symplectic_residual() == 0.0

    def test_time_additivity(self, exact, rng):
        p = random_jet(rng, 1, 3, 5, 5, exact)
        half = flow_jet(p, Fraction(1, 2), 4)
        assert half.compose(half) == flow_jet(p, 1, 4)

    def test_linear_flow_of_quadratic(self, fl):
        """exp H_{xξ}: x ↦ e·x, ξ ↦ ξ/e."""
        (x,), (xi,) = coords(1, 3, fl)
        kappa = flow_jet(x * xi, 1, 3)
        A = kappa.linear_part()
        assert complex(A[0][0]) == pytest.approx(2.718281828459045)
        assert complex(A[1][1]) == pytest.approx(0.36787944117144233)

    def test_compose_is_a_right_action(self, exact, rng):
        """(a∘m₁)∘m₂ = a∘(m₁∘m₂) for origin-fixing maps."""
        a = random_jet(rng, 2, 1, 4, 4, exact)
        m1 = flow_jet(random_jet(rng, 2, 3, 4, 5, exact), 1, 4)
        shear = MapJet.linear([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 4, exact)
        m2 = shear.compose(flow_jet(random_jet(rng, 2, 3, 3, 5, exact), 1, 4))
        assert compose(compose(a, m1), m2) == compose(a, m1.compose(m2))

    def test_lie_operator_rejects_linear(self, exact):
        with pytest.raises(PreconditionError):
            lie_operator(Jet.x(0, 1, 3, exact), 3)


# ── Graded operators ──


class TestBernoulli:
    @pytest.mark.parametrize(
        "k,value",
        [
            (0, Fraction(1)),
            (1, Fraction(-1, 2)),
            (2, Fraction(1, 6)),
            (3, 0),
            (4, Fraction(-1, 30)),
        ],
    )
    def test_values(self, k, value):
        assert bernoulli(k) == value


# ── h-jets ──


class TestHJet:
    def test_weight_truncation(self, exact):
        a = HJet.monomial(1, (2, 0), 1, 1, 3, 2, exact)
        assert a.layer(1).is_zero()
        b = HJet.monomial(1, (1, 0), 1, 1, 3, 2, exact)
        assert b.layer(1).coeff((1, 0)) == 1

    def test_h_times_h(self, exact):
        h = HJet.h(1, 4, 2, exact)
        assert (h * h).layer(2).constant_term() == 1

    def test_inverse_and_log(self, exact):
        a = HJet.constant(1, 1, 4, 1, exact) + HJet.from_jet(Jet.x(0, 1, 4, exact), 4, 1)
        assert a * a.inverse() == HJet.constant(1, 1, 4, 1, exact)
        assert a.log().exp() == a


# ── Protocols ──


class TestProtocols:
    def test_fields_satisfy_protocol(self, exact, fl):
        assert isinstance(exact, CoefficientField)
        assert isinstance(fl, CoefficientField)

    def test_jets_are_graded_vectors(self, exact):
        assert isinstance(Jet.x(0, 1, 2, exact), GradedVector)
        assert isinstance(HJet.h(1, 2, 1, exact), GradedVector)

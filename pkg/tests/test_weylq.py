"""Moyal calculus, operator logarithm and the quantum normal form."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
from conftest import coords, random_hjet, random_jet

from symnf.errors import PreconditionError
from symnf.jetcalc import HJet, Jet, compose, flow_jet, poisson
from symnf.weylq import (
    FormalFIO,
    commutator,
    conjugation_transport,
    fio_normal_form,
    gauge_difference,
    moyal,
    operator_log,
    quantum_bnf,
    quantum_bracket,
    reconstruct_amplitude,
    star_exp,
    star_inverse,
    star_log,
    symbol_normal_form,
)
from symnf.weylq import qbnf as qbnf_module
from symnf.weylq.oplog import canonical_gauge, collocation_nodes, integration_matrix


def lift(a: Jet, trunc: int, h_trunc: int) -> HJet:
    return HJet.from_jet(a, trunc, h_trunc)


def harmonic(n_trunc: int, field) -> Jet:
    (x,), (xi,) = coords(1, n_trunc, field)
    return (x * x + xi * xi).scale(Fraction(1, 2))


# ── Moyal product ──


class TestMoyal:
    def test_canonical_commutator(self, exact):
        """x # ξ − ξ # x = ih."""
        (x,), (xi,) = coords(1, 2, exact)
        c = commutator(lift(x, 2, 1), lift(xi, 2, 1))
        assert c.layer(0).is_zero()
        assert c.layer(1).constant_term() == exact.i

    def test_associative(self, exact, rng):
        a, b, c = (random_hjet(rng, 1, 4, 2, exact) for _ in range(3))
        assert moyal(moyal(a, b), c) == moyal(a, moyal(b, c))

    def test_conjugation_reverses_order(self, exact, rng):
        """conj(a # b) = conj(b) # conj(a)."""
        i = exact.i
        a, b = (
            random_hjet(rng, 1, 4, 2, exact) + random_hjet(rng, 1, 4, 2, exact).scale(i)
            for _ in range(2)
        )
        assert moyal(a, b).conj() == moyal(b.conj(), a.conj())

    def test_leading_order_is_pointwise(self, exact, rng):
        a, b = (random_hjet(rng, 2, 3, 1, exact) for _ in range(2))
        assert moyal(a, b).layer(0) == a.layer(0) * b.layer(0)

    def test_quantum_bracket_leading_term(self, exact):
        (x,), (xi,) = coords(1, 5, exact)
        p = lift((xi * xi * xi).scale(Fraction(1, 3)), 5, 2)
        y = lift(x.truncate(3), 3, 1)
        out = quantum_bracket(p, y)
        assert out.layer(0) == poisson(p.layer(0), y.layer(0))
        assert out.layer(1).is_zero()

    def test_star_exp_log(self, exact):
        (x,), (xi,) = coords(1, 4, exact)
        a = lift(x, 4, 1) + 1 + HJet.monomial(1, (0, 2), 1, 1, 4, 1, exact)
        assert star_exp(star_log(a)) == a

    def test_star_inverse(self, exact):
        (x,), (xi,) = coords(1, 4, exact)
        a = lift(x * xi + x, 4, 1) + 2
        one = HJet.constant(1, 1, 4, 1, exact)
        assert moyal(a, star_inverse(a)) == one
        assert moyal(star_inverse(a), a) == one

    def test_star_log_needs_ellipticity(self, exact):
        with pytest.raises(PreconditionError):
            star_log(lift(Jet.x(0, 1, 3, exact), 3, 1))


class TestConjugation:
    def test_shear_of_position(self, exact):
        """e^{iP/h} x e^{−iP/h} = x + ξ² for P = ξ³/3."""
        (x,), (xi,) = coords(1, 4, exact)
        P = lift((xi * xi * xi).scale(Fraction(1, 3)), 4, 1)
        out = conjugation_transport(P, lift(x, 4, 1))
        assert out.layer(0) == x + xi * xi
        assert out.layer(1).is_zero()

    def test_leading_layer_is_classical_pullback(self, exact, rng):
        g = random_jet(rng, 1, 3, 3, 5, exact)
        A = random_hjet(rng, 1, 4, 1, exact)
        out = conjugation_transport(lift(g, 4, 1), A)
        assert out.layer(0) == compose(A.layer(0), flow_jet(g, 1, 4))

    def test_time_additivity(self, exact, rng):
        P = lift(random_jet(rng, 1, 3, 4, 4, exact), 4, 1)
        A = random_hjet(rng, 1, 4, 1, exact)
        half = Fraction(1, 2)
        twice = conjugation_transport(P, conjugation_transport(P, A, half), half)
        assert twice == conjugation_transport(P, A)


# ── Collocation ──


class TestCollocation:
    def test_exact_simpson_weights(self, exact):
        nodes = collocation_nodes(2, exact)
        assert nodes == [0, Fraction(1, 2), 1]
        W = integration_matrix(nodes, exact)
        assert W[-1] == [Fraction(1, 6), Fraction(2, 3), Fraction(1, 6)]
        assert W[0] == [0, 0, 0]

    def test_float_nodes_integrate_polynomials(self, fl):
        nodes = collocation_nodes(4, fl)
        W = integration_matrix(nodes, fl)
        values = [s**3 for s in nodes]
        assert sum(w * v for w, v in zip(W[-1], values, strict=True)) == pytest.approx(0.25)


# ── Operator logarithm ──


class TestOperatorLog:
    def test_constant_amplitude(self, fl):
        amp = HJet.constant(cmath.exp(0.3j), 1, 2, 1, fl)
        p_ref = harmonic(4, fl)
        result = operator_log(FormalFIO(amp=amp, p_ref=p_ref))
        assert result.P.layer(0).allclose(p_ref)
        assert complex(result.R.constant_term()) == pytest.approx(-0.3)
        assert result.residual < 1e-10
        assert result.gauge_shift == 0

    def test_exact_round_trip(self, exact):
        (x,), (xi,) = coords(1, 5, exact)
        p_ref = (xi * xi * xi).scale(Fraction(1, 3)) + x * x * x * x
        amp = (
            lift(x * x + x * xi * xi, 3, 1)
            + 1
            + HJet.monomial(1, (1, 0), 1, 1, 3, 1, exact)
        )
        result = operator_log(FormalFIO(amp=amp, p_ref=p_ref))
        assert (result.P.trunc, result.P.h_trunc) == (5, 2)
        assert result.residual == 0.0
        assert reconstruct_amplitude(result.P, p_ref) == amp

    def test_homotopies_agree(self, fl):
        (x,), (xi,) = coords(1, 2, fl)
        amp = (lift(x * x, 2, 1).scale(0.1) + 1 + HJet.h(1, 2, 1, fl).scale(0.2)).scale(
            cmath.exp(0.3j)
        )
        U = FormalFIO(amp=amp, p_ref=harmonic(4, fl))
        P1 = operator_log(U, homotopy="exponential").P
        P2 = operator_log(U, homotopy="linear").P
        k = gauge_difference(P1, P2)
        assert k is not None
        assert k == pytest.approx(0.0, abs=1e-8)

    def test_winding_shifts_by_two_pi_h(self, fl):
        amp = HJet.constant(cmath.exp(0.5j), 1, 2, 1, fl)
        U = FormalFIO(amp=amp, p_ref=harmonic(4, fl))
        P0 = operator_log(U, winding=0, gauge_fix=False).P
        P1 = operator_log(U, winding=1, gauge_fix=False).P
        assert gauge_difference(P1, P0) == pytest.approx(-1.0)

    def test_canonical_gauge(self, fl):
        R = HJet.constant(7.0, 1, 2, 1, fl)
        shifted, shift = canonical_gauge(R, fl)
        assert shift == -1
        assert complex(shifted.constant_term()).real == pytest.approx(7.0 - 2 * math.pi)

    def test_round_trips(self, fl, rng):
        """Random h-dependent amplitudes over a harmonic reference, both homotopies."""
        p_ref = harmonic(4, fl)
        for trial in range(20):
            phase = cmath.exp(1j * rng.uniform(-1.0, 1.0))
            wiggle = random_hjet(rng, 1, 2, 1, fl) + random_hjet(rng, 1, 2, 1, fl).scale(1j)
            amp = (1 + HJet.h(1, 2, 1, fl).scale(0.1) + wiggle.scale(0.05)).scale(phase)
            homotopy = "exponential" if trial % 2 == 0 else "linear"
            result = operator_log(FormalFIO(amp=amp, p_ref=p_ref), homotopy=homotopy)
            assert reconstruct_amplitude(result.P, p_ref).allclose(amp, 1e-8), trial

    def test_unitary_amplitude_gives_real_symbol(self, fl):
        (x,), (xi,) = coords(1, 2, fl)
        G = lift(x.scale(0.2) + (x * x).scale(0.1) + (x * xi).scale(0.05), 2, 1) + 0.3
        amp = star_exp(G.scale(1j))
        result = operator_log(FormalFIO(amp=amp, p_ref=harmonic(4, fl)))
        assert result.P.imag_part().max_abs() < 1e-9

    def test_non_elliptic_amplitude(self, fl):
        amp = lift(Jet.x(0, 1, 2, fl), 2, 1)
        with pytest.raises(PreconditionError):
            FormalFIO(amp=amp, p_ref=harmonic(4, fl))


# ── Quantum Birkhoff normal form ──


class TestQuantumBNF:
    def test_hyperbolic_generator(self, exact):
        (x,), (xi,) = coords(1, 4, exact)
        P = lift((x * xi).scale(2), 4, 1) + HJet.monomial(1, (2, 0), 1, 1, 4, 1, exact)
        qnf = quantum_bnf(P)
        assert qnf.Q.layer(0) == (x * x).scale(Fraction(1, 4))
        assert qnf.R.is_zero()
        assert qnf.residual == 0.0

    def test_elliptic_averaging(self, fl):
        (x,), (xi,) = coords(1, 4, fl)
        P = lift(harmonic(4, fl), 4, 1) + HJet.monomial(1, (2, 0), 1.0, 1, 4, 1, fl)
        qnf = quantum_bnf(P)
        layer = qnf.R.layer(1)
        assert complex(layer.coeff((2, 0))) == pytest.approx(0.5)
        assert complex(layer.coeff((0, 2))) == pytest.approx(0.5)
        assert abs(complex(layer.coeff((1, 1)))) < 1e-10
        assert qnf.residual < 1e-10
        assert qnf.commutation_residual < 1e-10

    def test_real_input_gives_real_output(self, exact, rng):
        iota = harmonic(4, exact)
        layer0 = iota + (iota * iota).scale(Fraction(1, 5))
        P = HJet([layer0, random_jet(rng, 1, 1, 2, 2, exact)], 4, 1)
        qnf = quantum_bnf(P)
        assert qnf.Q.is_real()
        assert qnf.R.is_real()
        assert qnf.imaginary_residual == 0.0
        assert qnf.residual == 0.0

    def test_rejects_non_normal_layer(self, exact):
        (x,), (xi,) = coords(1, 4, exact)
        P = lift(harmonic(4, exact) + x * x * x, 4, 1)
        with pytest.raises(PreconditionError):
            quantum_bnf(P)


# ── Composite pipeline ──


class TestSymbolNormalForm:
    def test_classical_oracle(self, exact):
        (x,), (xi,) = coords(1, 4, exact)
        P = lift(harmonic(4, exact) + x * x * x, 4, 1)
        snf = symbol_normal_form(P)
        F0, F1 = snf.actions.layers
        assert F0.coeff((1,)) == 1
        assert F0.coeff((2,)) == Fraction(-15, 4)
        assert F1.coeffs == {}
        assert not snf.linear_normalization
        assert snf.transport_drift == 0.0

    def test_transport_drift_is_reported(self, exact, monkeypatch):
        (x,), (xi,) = coords(1, 4, exact)
        P = lift(harmonic(4, exact) + x * x * x, 4, 1)
        extra = lift(x * x * x * x, 4, 1)
        monkeypatch.setattr(qbnf_module, "conjugation_transport", lambda G, A: A + extra)
        snf = symbol_normal_form(P)
        assert snf.transport_drift > 0
        assert snf.actions.layers[0].coeff((2,)) == Fraction(-15, 4)


class TestFIONormalForm:
    @staticmethod
    def planted(fl) -> Jet:
        act = harmonic(4, fl)
        return act + (act * act).scale(0.1)

    def test_planted_normal_form(self, fl):
        amp = HJet.constant(cmath.exp(-0.2j), 1, 2, 1, fl)
        nf = fio_normal_form(FormalFIO(amp=amp, p_ref=self.planted(fl)))
        F0, F1 = nf.actions.layers[:2]
        assert complex(F0.coeff((1,))) == pytest.approx(1.0)
        assert complex(F0.coeff((2,))) == pytest.approx(0.1)
        assert complex(F1.coeff((0,))) == pytest.approx(0.2)
        assert nf.metadata["homotopy"] == "exponential"
        assert nf.metadata["gauge_shift"] == 0

    def test_kappa_input_matches_generator(self, fl):
        amp = HJet.constant(cmath.exp(-0.2j), 1, 2, 1, fl)
        kappa = flow_jet(self.planted(fl), 1, 3)
        from_kappa = fio_normal_form(FormalFIO(amp=amp, kappa=kappa))
        from_p = fio_normal_form(FormalFIO(amp=amp, p_ref=self.planted(fl)))
        for a, b in zip(from_kappa.actions.layers, from_p.actions.layers, strict=True):
            assert a.allclose(b, 1e-8)

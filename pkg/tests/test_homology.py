"""Resonance scans and homological equations."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
from conftest import coords, random_jet

from symnf.errors import FieldError, PreconditionError, ResonanceError
from symnf.fields import GaussianRational
from symnf.homology import (
    LatticeValue,
    averaged_conditioning,
    averaged_transport,
    integer_vectors,
    is_resonant,
    resonance_scan,
    solve_averaged,
    solve_h_p,
    solve_h_p0,
)
from symnf.jetcalc import Jet, poisson

IMAG = GaussianRational(Fraction(0), Fraction(1))


# ── Resonance scan ──


class TestIntegerVectors:
    def test_one_representative_per_sign(self):
        ks = list(integer_vectors(2, 1))
        assert set(ks) == {(1, 0), (0, 1)}

    def test_bound(self):
        assert all(sum(map(abs, k)) <= 3 for k in integer_vectors(3, 3))


class TestResonanceScan:
    def test_exact_birkhoff_violation(self):
        mus = [LatticeValue(IMAG), LatticeValue(IMAG * 2)]
        report = resonance_scan(mus, 3, ("birkhoff",))
        assert report.exact
        assert not report.verdicts["birkhoff"]
        assert [v.k for v in report.violations] == [[2, -1]]

    def test_exact_lattice_value(self):
        """μ = 2πi is a flow-log resonance at degree 1."""
        mus = [LatticeValue(GaussianRational.lift(0), Fraction(1))]
        report = resonance_scan(mus, 2, ("flow-log", "birkhoff"))
        assert not report.verdicts["flow-log"]
        assert report.verdicts["birkhoff"]

    def test_float_flow_log(self):
        report = resonance_scan([2j * math.pi], 1, ("flow-log",))
        assert [v.k for v in report.violations] == [[1]]

    def test_nonresonant_has_gap(self):
        report = resonance_scan([1.0, math.sqrt(2)], 4)
        assert all(report.verdicts.values())
        assert report.min_gap is not None and report.min_gap > 0

    def test_averaged_condition(self):
        mu = cmath.pi * 1j
        report = resonance_scan([mu], 2, ("averaged",))
        assert not report.verdicts["averaged"]
        assert report.violations[0].degree == 2

    def test_unknown_condition(self):
        with pytest.raises(PreconditionError):
            resonance_scan([1.0], 2, ("bogus",))


# ── Averaged transport ──


class TestAveragedTransport:
    def test_phi1_weights(self, fl):
        (x,), (xi,) = coords(1, 3, fl)
        mu = math.log(2)
        p0 = (x * xi).scale(mu)
        out = averaged_transport(x * x + xi * xi + x * xi, p0)
        assert complex(out.coeff((2, 0))) == pytest.approx(3 / (2 * mu))
        assert complex(out.coeff((0, 2))) == pytest.approx(0.75 / (2 * mu))
        assert complex(out.coeff((1, 1))) == pytest.approx(1.0)

    def test_exact_kernel_weight(self, exact):
        (x,), (xi,) = coords(1, 3, exact)
        assert averaged_transport(x * xi, x * xi) == x * xi

    def test_exact_transcendental_rejected(self, exact):
        (x,), (xi,) = coords(1, 3, exact)
        with pytest.raises(FieldError):
            averaged_transport(x * x, x * xi)

    def test_conditioning_hyperbolic(self, fl):
        (x,), (xi,) = coords(1, 3, fl)
        mu = math.log(2)
        assert averaged_conditioning((x * xi).scale(mu), 2) == pytest.approx(0.75 / (2 * mu))

    def test_conditioning_elliptic(self, fl):
        """β ∈ {±i, ±3i} at degree 3; the worst is |e^{3i} − 1|/3."""
        (x,), (xi,) = coords(1, 3, fl)
        p0 = (x * x + xi * xi).scale(0.5)
        assert averaged_conditioning(p0, 3) == pytest.approx(2 * math.sin(1.5) / 3)

    def test_solve_inverts(self, fl):
        (x1, x2), (xi1, xi2) = coords(2, 3, fl)
        p0 = (x1 * xi1).scale(0.7) + (x2 * xi2).scale(1.3)
        v = x1 * x1 * xi2 + x2 * xi1 * xi2 + x1 * xi1
        assert averaged_transport(solve_averaged(v, p0), p0).allclose(v)

    def test_solve_non_diagonal(self, fl):
        (x,), (xi,) = coords(1, 3, fl)
        p0 = (x * x + xi * xi).scale(0.5)
        v = x * x * x + x * xi * xi
        assert averaged_transport(solve_averaged(v, p0), p0).allclose(v)

    def test_lattice_resonance_rejected(self, fl):
        (x,), (xi,) = coords(1, 3, fl)
        p0 = (x * xi).scale(1j * math.pi)
        with pytest.raises(ResonanceError) as exc:
            solve_averaged(x * x, p0)
        assert exc.value.details["condition"] == "averaged"


# ── H_p equations ──


class TestHomological:
    def test_split_identity(self, exact, rng):
        (x1, x2), (xi1, xi2) = coords(2, 4, exact)
        p0 = x1 * xi1 + (x2 * xi2).scale(Fraction(5, 3))
        v = random_jet(rng, 2, 3, 4, 4, exact)
        split = solve_h_p0(v, p0)
        assert poisson(p0, split.u) == v + split.r
        assert is_resonant(split.r)

    def test_resonant_terms_go_to_r(self, exact):
        (x,), (xi,) = coords(1, 4, exact)
        split = solve_h_p0(x * x * xi * xi, x * xi)
        assert split.u.is_zero()
        assert split.r == -(x * x * xi * xi)

    def test_non_diagonal_rejected(self, exact):
        (x,), (xi,) = coords(1, 3, exact)
        with pytest.raises(PreconditionError):
            solve_h_p0(x * x * x, x * x + xi * xi)

    def test_birkhoff_resonance(self, exact):
        (x1, x2), (xi1, xi2) = coords(2, 3, exact)
        p0 = x1 * xi1 + (x2 * xi2).scale(2)
        with pytest.raises(ResonanceError) as exc:
            solve_h_p0(x1 * x1 * xi2, p0)
        assert list(exc.value.details["k"]) == [2, -1]

    def test_full_operator(self, exact, rng):
        (x1, x2), (xi1, xi2) = coords(2, 5, exact)
        p = x1 * xi1 + (x2 * xi2).scale(Fraction(5, 3)) + random_jet(rng, 2, 3, 5, 5, exact)
        v = random_jet(rng, 2, 3, 5, 5, exact)
        split = solve_h_p(v, p)
        lhs = poisson(p, split.u, 5)
        assert lhs.truncate(5) == (v + split.r).truncate(5)
        assert isinstance(split.u, Jet)

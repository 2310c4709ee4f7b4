"""Map logarithm — generators of symplectic map jets."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from conftest import coords, random_jet

from symnf.birkhoff import QuadraticNormalForm
from symnf.errors import NegativeEigenvalueError, ResonanceError
from symnf.jetcalc import Jet, MapJet, flow_jet
from symnf.maplog import (
    flow_divergence_degree,
    map_log,
    map_log_report,
    map_log_uniqueness_check,
)
from symnf.symlin import hamilton_matrix


class TestExactMapLog:
    def test_cubic_shear(self, exact):
        (x,), (xi,) = coords(1, 2, exact)
        p = map_log(MapJet([x + xi * xi, xi], 2))
        assert p == Jet(1, 3, {(0, 3): Fraction(1, 3)}, exact)

    def test_round_trip(self, exact, rng):
        p = random_jet(rng, 1, 3, 5, 5, exact)
        kappa = flow_jet(p, 1, 4)
        assert map_log_uniqueness_check(map_log(kappa), p, 5)

    def test_two_dof_round_trip(self, exact, rng):
        p = random_jet(rng, 2, 3, 4, 4, exact)
        kappa = flow_jet(p, 1, 3)
        report = map_log_report(kappa)
        assert (report.p - p).is_zero()
        assert all(v == 0.0 for v in report.residuals.values())

    def test_flow_divergence(self, exact):
        p = Jet(1, 5, {(0, 3): Fraction(1, 3)}, exact)
        tampered = p + Jet(1, 5, {(4, 0): 1}, exact)
        assert flow_divergence_degree(p, tampered, 4) == 3
        assert flow_divergence_degree(p, p, 4) is None


class TestFloatMapLog:
    def test_hyperbolic_round_trip(self, fl):
        (x,), (xi,) = coords(1, 5, fl)
        p = (x * xi).scale(0.8) + x * x * x.scale(0.3) - (x * xi * xi).scale(0.2)
        p = p + (x * x * xi * xi).scale(0.1)
        kappa = flow_jet(p, 1, 4)
        report = map_log_report(kappa)
        assert report.p.allclose(p.truncate(5), 1e-8)
        assert max(report.residuals.values()) < 1e-9
        assert set(report.conditioning) <= {3, 4, 5}

    def test_elliptic_round_trip(self, fl):
        (x,), (xi,) = coords(1, 4, fl)
        p = (x * x + xi * xi).scale(0.35) + x * x * xi.scale(0.4)
        kappa = flow_jet(p, 1, 3)
        assert map_log(kappa).allclose(p, 1e-8)

    def test_linear_map(self, fl):
        A = np.diag([math.e, 1 / math.e])
        p = map_log(MapJet.linear(A, 3, fl))
        assert complex(p.coeff((1, 1))) == pytest.approx(1.0)
        assert p.degree_range(3, 4).is_zero()

    def test_negative_eigenvalue(self, fl):
        with pytest.raises(NegativeEigenvalueError):
            map_log(MapJet.linear(np.diag([-2.0, -0.5]), 2, fl))

    def test_flow_log_resonance(self, fl):
        """Rotation by 2π/3: μ = 2πi/3 makes 3μ ∈ 2πiℤ."""
        theta = 2 * math.pi / 3
        c, s = math.cos(theta), math.sin(theta)
        with pytest.raises(ResonanceError) as exc:
            map_log(MapJet.linear(np.array([[c, s], [-s, c]]), 2, fl))
        assert exc.value.details["condition"] == "flow-log"

    def test_loxodromic_flow_log_resonance(self, fl):
        """μ = 0.2 + iπ/2 on a loxodromic block: 2μ − 2μ̄ = 2πi at degree 4."""
        q = QuadraticNormalForm(n_hc=1, n_hr=0, n_e=0, alphas=(0.2,), betas=(math.pi / 2,))
        A = scipy.linalg.expm(np.real(hamilton_matrix(q.quadratic_part(2))))
        kappa = MapJet.linear(A, 3, fl)
        with pytest.raises(ResonanceError) as exc:
            map_log(kappa)
        assert exc.value.details["condition"] == "flow-log"
        assert exc.value.details["degree"] == 4
        assert sorted(map(abs, exc.value.details["k"])) == [2, 2]

    def test_loxodromic_below_resonance(self, fl):
        q = QuadraticNormalForm(n_hc=1, n_hr=0, n_e=0, alphas=(0.2,), betas=(math.pi / 2,))
        p2 = q.quadratic_part(3)
        A = scipy.linalg.expm(np.real(hamilton_matrix(q.quadratic_part(2))))
        assert map_log(MapJet.linear(A, 2, fl)).allclose(p2, 1e-9)


class TestRandomMapLogs:
    @staticmethod
    def quadratic(rng, n: int, trunc: int, fl) -> Jet:
        """Hyperbolic first degree of freedom, elliptic second; all rates below 1.2."""
        xs, xis = coords(n, trunc, fl)
        p2 = (xs[0] * xis[0]).scale(rng.uniform(0.3, 1.2))
        if n == 2:
            p2 = p2 + (xs[1] * xs[1] + xis[1] * xis[1]).scale(rng.uniform(0.15, 0.6))
        elif rng.random() < 0.5:
            p2 = (xs[0] * xs[0] + xis[0] * xis[0]).scale(rng.uniform(0.15, 0.6))
        return p2

    def test_round_trips(self, fl, rng):
        for trial in range(50):
            n = 2 if trial % 5 == 0 else 1
            N = 3 if n == 2 else 4
            p = self.quadratic(rng, n, N + 1, fl)
            p = p + random_jet(rng, n, 3, N, N + 1, fl).scale(0.1)
            report = map_log_report(flow_jet(p, 1, N))
            assert report.p.allclose(p, 1e-8), trial
            assert max(report.residuals.values()) < 1e-9, trial

"""Linear symplectic algebra — checks, quadratic forms and the real logarithm."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from conftest import coords

from symnf.errors import FieldError, NegativeEigenvalueError, PreconditionError, ResonanceError
from symnf.fields import LatticeValue
from symnf.homology import resonance_scan
from symnf.jetcalc import Jet, MapJet
from symnf.jetcalc.matrices import as_matrix, symplectic_form
from symnf.maplog import map_log
from symnf.symlin import (
    ExactCluster,
    check_symplectic,
    expm,
    hamilton_matrix,
    quadratic_form,
    spectral_pairing,
    symplectic_log,
)


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def loxodromic(alpha: float, beta: float, fl) -> np.ndarray:
    """exp of the loxodromic block α(x₁ξ₁ + x₂ξ₂) − β(x₁ξ₂ − x₂ξ₁)."""
    (x1, x2), (xi1, xi2) = coords(2, 2, fl)
    p2 = (x1 * xi1 + x2 * xi2).scale(alpha) - (x1 * xi2 - x2 * xi1).scale(beta)
    return scipy.linalg.expm(np.real(hamilton_matrix(p2)))


class TestCheckSymplectic:
    def test_shear_exact(self, exact):
        check = check_symplectic([[1, 3], [0, 1]], exact)
        assert check.is_symplectic
        assert check.residual == 0.0

    def test_scaling_rejected(self, exact):
        assert not check_symplectic([[2, 0], [0, 2]], exact).is_symplectic

    def test_float_tolerance(self, fl):
        assert check_symplectic(rotation(0.3), fl).is_symplectic


class TestQuadraticForm:
    def test_convention(self, exact):
        """diag(1, −1) generates the hyperbolic flow of xξ."""
        b = quadratic_form([[1, 0], [0, -1]], 2, exact)
        assert b.terms == {(1, 1): 1}

    def test_hamilton_matrix_inverts(self, exact):
        b = Jet(1, 2, {(2, 0): Fraction(1, 2), (1, 1): 3, (0, 2): -2}, exact)
        assert quadratic_form(hamilton_matrix(b), 2, exact) == b

    def test_non_hamiltonian_rejected(self, exact):
        with pytest.raises(PreconditionError):
            quadratic_form([[1, 0], [0, 1]], 2, exact)


class TestSymplecticLog:
    def test_hyperbolic_diagonal(self, fl):
        A = np.diag([math.e, 1 / math.e])
        log = symplectic_log(A, field=fl)
        assert np.allclose(log.B, np.diag([1.0, -1.0]), atol=1e-10)
        assert log.residuals["exp"] < 1e-10

    def test_rotation(self, fl):
        log = symplectic_log(rotation(0.7), field=fl)
        assert np.allclose(expm(log.B, fl), rotation(0.7), atol=1e-10)
        assert np.allclose(log.B.imag, 0.0)

    def test_exact_unipotent(self, exact):
        log = symplectic_log([[1, 1], [0, 1]], field=exact)
        assert log.B.tolist() == as_matrix([[0, 1], [0, 0]], exact).tolist()
        assert log.residuals == {"symplectic": 0.0, "hamiltonian": 0.0, "projection": 0.0}

    def test_two_dof_block_diagonal(self, fl):
        A = np.zeros((4, 4))
        A[np.ix_([0, 2], [0, 2])] = rotation(0.4)
        A[np.ix_([1, 3], [1, 3])] = np.diag([2.0, 0.5])
        log = symplectic_log(A, field=fl)
        assert np.allclose(expm(log.B, fl), A, atol=1e-10)
        assert check_symplectic(expm(log.B, fl), fl).is_symplectic

    def test_negative_eigenvalue(self, fl):
        with pytest.raises(NegativeEigenvalueError):
            symplectic_log(np.diag([-2.0, -0.5]), field=fl)

    def test_unknown_branch(self, fl):
        with pytest.raises(PreconditionError):
            symplectic_log(np.eye(2), "nearest", field=fl)

    def test_non_symplectic_rejected(self, fl):
        with pytest.raises(PreconditionError, match="not symplectic") as exc:
            symplectic_log(np.diag([2.0, 2.0]), field=fl)
        assert exc.value.details["residual"] > 1.0

    def test_exact_non_symplectic_rejected(self, exact):
        with pytest.raises(PreconditionError, match="not symplectic"):
            symplectic_log([[1, 1], [1, 1]], field=exact)

    def test_loxodromic(self, fl):
        A = loxodromic(0.3, 0.8, fl)
        log = symplectic_log(A, field=fl)
        (block,) = log.spectral.blocks
        assert block.kind == "loxodromic"
        assert len(block.clusters) == 4
        assert block.mu == pytest.approx(0.3 + 0.8j)
        assert log.residuals["exp"] < 1e-10
        assert np.allclose(scipy.linalg.expm(log.B.real), A, atol=1e-10)

    def test_spectral_blocks(self, fl):
        log = symplectic_log(np.diag([math.e, 1 / math.e]), field=fl)
        kinds = [b.kind for b in log.spectral.blocks]
        assert len(kinds) == 1
        assert log.spectral.representative_mus()[0] == pytest.approx(1.0)


class TestSpectralPairing:
    def test_hyperbolic_pair(self, fl):
        data = spectral_pairing(np.diag([2.0, 0.5]), field=fl)
        (block,) = data.blocks
        assert block.kind == "hyperbolic-real"
        assert block.representative == pytest.approx(2.0)
        assert [c.mu for c in block.clusters] == pytest.approx([math.log(2), -math.log(2)])
        assert "cluster_rule" in data.metadata

    def test_elliptic_winding(self, fl):
        data = spectral_pairing(rotation(math.pi / 3), field=fl, windings={0: 1})
        (block,) = data.blocks
        assert block.kind == "elliptic"
        assert block.mu == pytest.approx(1j * (math.pi / 3 + 2 * math.pi))

    def test_unit_jordan_ranks(self, fl):
        data = spectral_pairing(np.array([[1.0, 1.0], [0.0, 1.0]]), field=fl)
        (block,) = data.blocks
        assert block.kind == "unit"
        assert block.jordan_ranks == (1, 0)
        assert data.metadata["unit_basis"] == "svd-null-space"

    def test_loxodromic_mus_include_conjugate(self, fl):
        """The orbit {λ, 1/λ, λ̄, 1/λ̄} holds two pairs: μ and μ̄ both enter the scan."""
        data = spectral_pairing(loxodromic(0.2, math.pi / 2, fl), field=fl)
        mus = sorted(data.representative_mus(), key=lambda z: z.imag)
        assert mus == pytest.approx([0.2 - 0.5j * math.pi, 0.2 + 0.5j * math.pi])

    def test_eigenspaces_are_sigma_orthogonal(self, fl):
        A = np.zeros((4, 4))
        A[np.ix_([0, 2], [0, 2])] = rotation(0.9)
        A[np.ix_([1, 3], [1, 3])] = np.diag([3.0, 1 / 3])
        data = spectral_pairing(A, field=fl)
        assert data.orthogonality_residual < 1e-10
        assert spectral_pairing(loxodromic(0.4, 1.1, fl), field=fl).orthogonality_residual < 1e-10


# ── Exact logs with a 2π part ──


class TestExactLatticeLog:
    ROTATION = [[0, 1], [-1, 0]]

    @staticmethod
    def quarter_turn(exact, sign: int = 1) -> list[ExactCluster]:
        """Eigenvectors of the quarter turn with μ(±i) = ±2πi/4."""
        i = exact.i
        return [
            ExactCluster(i, LatticeValue(exact.zero, Fraction(1, 4)), [[exact.one, i]]),
            ExactCluster(-i, LatticeValue(exact.zero, Fraction(-sign, 4)), [[exact.one, -i]]),
        ]

    def test_lattice_part(self, exact):
        log = symplectic_log(self.ROTATION, field=exact, exact_spectrum=self.quarter_turn(exact))
        assert log.B.tolist() == as_matrix([[0, 0], [0, 0]], exact).tolist()
        expected = as_matrix([[0, Fraction(1, 4)], [Fraction(-1, 4), 0]], exact)
        assert log.lattice_part.tolist() == expected.tolist()
        assert np.allclose(scipy.linalg.expm(log.total().real), self.ROTATION, atol=1e-12)

    def test_scan_is_decided_exactly(self, exact):
        log = symplectic_log(self.ROTATION, field=exact, exact_spectrum=self.quarter_turn(exact))
        mus = log.spectral.representative_mus()
        assert mus == [LatticeValue(exact.zero, Fraction(1, 4))]
        report = resonance_scan(mus, 4, ("flow-log",))
        assert report.exact
        assert [v.k for v in report.violations] == [[4]]

    def test_branch_rule_checked(self, exact):
        with pytest.raises(PreconditionError, match="1/λ"):
            symplectic_log(
                self.ROTATION, field=exact, exact_spectrum=self.quarter_turn(exact, sign=-1)
            )

    def test_map_log_resonance(self, exact):
        kappa = MapJet.linear(self.ROTATION, 3, exact)
        with pytest.raises(ResonanceError) as exc:
            map_log(kappa, exact_spectrum=self.quarter_turn(exact))
        assert exc.value.details["condition"] == "flow-log"
        assert exc.value.details["degree"] == 4

    def test_map_log_below_resonance_needs_floats(self, exact):
        kappa = MapJet.linear(self.ROTATION, 2, exact)
        with pytest.raises(FieldError):
            map_log(kappa, exact_spectrum=self.quarter_turn(exact))


# ── Seeded batteries ──


class TestRandomLogs:
    def test_round_trips(self, fl):
        """exp of a small random Hamiltonian matrix, then back."""
        gen = np.random.default_rng(20240611)
        for trial in range(100):
            n = 1 + trial % 2
            J = symplectic_form(n, fl).real
            G = gen.normal(size=(2 * n, 2 * n))
            B = J @ (G + G.T)
            B *= gen.uniform(0.2, 2.0) / np.linalg.norm(B, 2)
            A = scipy.linalg.expm(B)
            log = symplectic_log(A, field=fl)
            assert log.residuals["exp"] < 1e-9, trial
            assert log.residuals["projection"] < 1e-8, trial
            assert np.allclose(log.B.real, B, atol=1e-7), trial
            S = J.T @ log.B.real
            assert np.allclose(S, S.T, atol=1e-12), trial

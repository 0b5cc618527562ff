"""Closed-form pair analysis: K matrix, probabilities, no-signaling, and
agreement with the branching simulation."""

import math

import numpy as np
import pytest

from eprsim import (
    CoefficientMatrix,
    DimensionError,
    NormalizationError,
    ObservableBasis,
    amplitude_grid,
    from_coefficients,
    identity_basis,
    joint_probability,
    k_matrix,
    marginal,
    measure,
    no_signaling_report,
    no_signaling_sweep,
    random_coefficients,
    random_unitary,
    run_epr,
    singlet,
)
from eprsim.spin import rotation_overlap

RT2 = 1.0 / math.sqrt(2.0)


def k_closed_form(theta_deg: float) -> np.ndarray:
    # independent oracle: singlet against the tilted basis
    half = math.radians(theta_deg) / 2.0
    s, c = math.sin(half), math.cos(half)
    return RT2 * np.array([[1j * s, c], [-c, -1j * s]])


class TestCoefficientMatrix:
    def test_normalization_enforced(self):
        with pytest.raises(NormalizationError):
            CoefficientMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))

    def test_dims(self):
        c = CoefficientMatrix(np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))
        assert (c.d1, c.d2) == (2, 3)


class TestKMatrix:
    def test_identity_bases_return_coefficients(self):
        c = singlet()
        k = k_matrix(c, identity_basis(2), identity_basis(2))
        np.testing.assert_allclose(k.matrix, c.matrix, atol=1e-15)

    @pytest.mark.parametrize("theta", [0.0, 30.0, 60.0, 90.0, 120.0, 180.0])
    def test_singlet_closed_form(self, theta):
        k = k_matrix(singlet(), identity_basis(2), rotation_overlap(theta))
        np.testing.assert_allclose(k.matrix, k_closed_form(theta), atol=1e-12)

    def test_concentrated_coefficients(self):
        c = CoefficientMatrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
        basis = ObservableBasis(1, random_unitary(2, 21))
        k = k_matrix(c, identity_basis(2), basis).matrix
        np.testing.assert_allclose(k[0], basis.matrix[0].conj(), atol=1e-12)
        np.testing.assert_allclose(k[1], 0.0, atol=1e-12)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            k_matrix(singlet(), identity_basis(3), identity_basis(2))


class TestJointProbability:
    def test_singlet_aligned(self):
        k = k_matrix(singlet(), identity_basis(2), identity_basis(2))
        np.testing.assert_allclose(
            joint_probability(k).matrix, [[0.0, 0.5], [0.5, 0.0]], atol=1e-12
        )

    def test_singlet_perpendicular(self):
        k = k_matrix(singlet(), identity_basis(2), rotation_overlap(90.0))
        np.testing.assert_allclose(
            joint_probability(k).matrix, np.full((2, 2), 0.25), atol=1e-12
        )

    def test_single_nonzero_entry(self):
        c = CoefficientMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
        p = joint_probability(k_matrix(c, identity_basis(2), identity_basis(2)))
        np.testing.assert_allclose(p.matrix, [[0.0, 1.0], [0.0, 0.0]], atol=1e-15)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(31)
        base = random_coefficients(2, 3, rng)
        basis = ObservableBasis(1, random_unitary(3, rng))
        p0 = joint_probability(k_matrix(base, identity_basis(2), basis)).matrix
        for phi in (0.3, 1.7, -2.2):
            rotated = CoefficientMatrix(np.exp(1j * phi) * base.matrix)
            p1 = joint_probability(k_matrix(rotated, identity_basis(2), basis)).matrix
            np.testing.assert_allclose(p1, p0, atol=1e-12)


class TestMarginal:
    def test_singlet_flat(self):
        for theta in (0.0, 45.0, 90.0, 135.0):
            p = joint_probability(
                k_matrix(singlet(), identity_basis(2), rotation_overlap(theta))
            )
            np.testing.assert_allclose(marginal(p, 1), [0.5, 0.5], atol=1e-12)

    def test_side_two(self):
        c = CoefficientMatrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
        p = joint_probability(k_matrix(c, identity_basis(2), identity_basis(2)))
        np.testing.assert_allclose(marginal(p, 2), [1.0, 0.0], atol=1e-15)

    def test_bad_side_rejected(self):
        p = joint_probability(k_matrix(singlet(), identity_basis(2), identity_basis(2)))
        with pytest.raises(ValueError):
            marginal(p, 3)

    @pytest.mark.parametrize("seed", range(10))
    def test_side_one_fixed_by_coefficient_rows(self, seed):
        # unitarity of the far basis forces the near marginal
        rng = np.random.default_rng([2, seed])
        c = random_coefficients(3, 3, rng)
        basis = ObservableBasis(1, random_unitary(3, rng))
        p = joint_probability(k_matrix(c, identity_basis(3), basis))
        expected = np.sum(np.abs(c.matrix) ** 2, axis=1)
        np.testing.assert_allclose(marginal(p, 1), expected, atol=1e-10)


class TestNoSignaling:
    def test_singlet_angle_sweep(self):
        bases = [rotation_overlap(t, basis_id=i) for i, t in enumerate((0.0, 45.0, 90.0, 135.0))]
        report = no_signaling_report(singlet(), bases)
        assert report.passed
        assert report.max_deviation < 1e-12
        np.testing.assert_allclose(report.marginals, 0.5, atol=1e-12)

    def test_product_state(self):
        c = CoefficientMatrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
        rng = np.random.default_rng(6)
        bases = [ObservableBasis(i, random_unitary(2, rng)) for i in (1, 2)]
        report = no_signaling_report(c, bases)
        assert report.passed
        np.testing.assert_allclose(report.marginals, [[1.0, 0.0]] * 2, atol=1e-12)

    def test_single_basis_rejected(self):
        with pytest.raises(ValueError):
            no_signaling_report(singlet(), [identity_basis(2)])

    def test_sweep_passes_and_is_deterministic(self):
        a = no_signaling_sweep(trials=20, dim=3, seed=5)
        b = no_signaling_sweep(trials=20, dim=3, seed=5)
        assert a == b
        assert a.passed
        assert a.max_deviation <= 1e-10


class TestRunEpr:
    def test_singlet_aligned_two_branches(self):
        state = run_epr(singlet(), identity_basis(2))
        amps = {
            (b.registers[0][0].index, b.registers[1][0].index): b.amplitude
            for b in state.branches
        }
        assert set(amps) == {(0, 1), (1, 0)}
        assert amps[(0, 1)] == pytest.approx(RT2, abs=1e-12)
        assert amps[(1, 0)] == pytest.approx(-RT2, abs=1e-12)

    def test_singlet_perpendicular_four_branches(self):
        state = run_epr(singlet(), rotation_overlap(90.0))
        assert len(state.branches) == 4
        for branch in state.branches:
            assert abs(branch.amplitude) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("theta", np.arange(0.0, 181.0, 10.0))
    def test_grid_matches_k_matrix(self, theta):
        basis = rotation_overlap(theta)
        state = run_epr(singlet(), basis)
        grid = amplitude_grid(state, (2, 2))
        k = k_matrix(singlet(), identity_basis(2), basis).matrix
        np.testing.assert_allclose(grid, k, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3])
    @pytest.mark.parametrize("seed", range(10))
    def test_random_equivalence(self, dim, seed):
        rng = np.random.default_rng([dim, seed])
        c = random_coefficients(dim, dim, rng)
        basis = ObservableBasis(1, random_unitary(dim, rng))
        grid = amplitude_grid(run_epr(c, basis), (dim, dim))
        k = k_matrix(c, identity_basis(dim), basis).matrix
        np.testing.assert_allclose(grid, k, atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_measurement_order_does_not_matter(self, seed):
        rng = np.random.default_rng([3, seed])
        c = random_coefficients(2, 2, rng)
        basis = ObservableBasis(1, random_unitary(2, rng))
        forward = amplitude_grid(run_epr(c, basis), (2, 2))

        state = from_coefficients(c)
        state = measure(state, 1, 1, basis)
        state = measure(state, 0, 0, identity_basis(2))
        backward = amplitude_grid(state, (2, 2))
        np.testing.assert_allclose(backward, forward, atol=1e-12)

"""Singlet tables against the half-angle closed form."""

import math

import numpy as np
import pytest

from eprsim import correlation, marginal, rotation_overlap, singlet, singlet_joint_probability

RT2 = 1.0 / math.sqrt(2.0)

GRID = np.arange(0.0, 181.0, 1.0)


def p_closed_form(theta_deg: float) -> np.ndarray:
    half = math.radians(theta_deg) / 2.0
    s2, c2 = math.sin(half) ** 2, math.cos(half) ** 2
    return 0.5 * np.array([[s2, c2], [c2, s2]])


class TestSinglet:
    def test_entries(self):
        c = singlet().matrix
        assert c[0, 1] == pytest.approx(RT2)
        assert c[1, 0] == pytest.approx(-RT2)
        assert c[0, 0] == c[1, 1] == 0.0

    def test_normalized(self):
        assert np.sum(np.abs(singlet().matrix) ** 2) == pytest.approx(1.0)


class TestRotationOverlap:
    def test_zero_angle_is_identity(self):
        np.testing.assert_allclose(rotation_overlap(0.0).matrix, np.eye(2), atol=1e-15)

    def test_half_turn(self):
        np.testing.assert_allclose(
            rotation_overlap(180.0).matrix,
            [[0.0, -1j], [-1j, 0.0]],
            atol=1e-12,
        )

    def test_quarter_turn_unitary(self):
        m = rotation_overlap(90.0).matrix
        np.testing.assert_allclose(
            m, [[RT2, -1j * RT2], [-1j * RT2, RT2]], atol=1e-12
        )
        np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-15)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            rotation_overlap(math.nan)


class TestJointProbability:
    @pytest.mark.parametrize(
        "theta,expected",
        [
            (0.0, [[0.0, 0.5], [0.5, 0.0]]),
            (60.0, [[0.125, 0.375], [0.375, 0.125]]),
            (180.0, [[0.5, 0.0], [0.0, 0.5]]),
        ],
    )
    def test_spot_values(self, theta, expected):
        np.testing.assert_allclose(
            singlet_joint_probability(theta).matrix, expected, atol=1e-12
        )

    def test_closed_form_on_grid(self):
        for theta in GRID:
            np.testing.assert_allclose(
                singlet_joint_probability(theta).matrix,
                p_closed_form(theta),
                atol=1e-12,
            )

    def test_symmetry(self):
        for theta in (13.0, 77.5, 140.0):
            p = singlet_joint_probability(theta).matrix
            assert p[0, 0] == pytest.approx(p[1, 1], abs=1e-15)
            assert p[0, 1] == pytest.approx(p[1, 0], abs=1e-15)

    def test_marginals_flat_on_grid(self):
        for theta in GRID:
            p = singlet_joint_probability(theta)
            np.testing.assert_allclose(marginal(p, 1), [0.5, 0.5], atol=1e-12)
            np.testing.assert_allclose(marginal(p, 2), [0.5, 0.5], atol=1e-12)


class TestCorrelation:
    @pytest.mark.parametrize(
        "theta,expected", [(0.0, -1.0), (90.0, 0.0), (180.0, 1.0)]
    )
    def test_spot_values(self, theta, expected):
        assert correlation(theta) == pytest.approx(expected, abs=1e-12)

    def test_negative_cosine_on_grid(self):
        for theta in GRID:
            assert abs(correlation(theta) + math.cos(math.radians(theta))) < 1e-12

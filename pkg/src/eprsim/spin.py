"""Spin-1/2 singlet pair measured along tilted axes.

Angles are in degrees throughout. The second observer's analyzer is
tilted by ``theta`` relative to the first observer's; the spin-1/2
change-of-basis matrix for that tilt has half-angle cosines on the
diagonal and ``-i sin(theta/2)`` off it.
"""

from __future__ import annotations

import math

import numpy as np

from .branching import ObservableBasis, identity_basis
from .epr import CoefficientMatrix, JointDistribution, joint_probability, k_matrix

ROTATED_BASIS_ID = 1


def singlet() -> CoefficientMatrix:
    """Antisymmetric two-spin preparation (total spin zero)."""
    r = 1.0 / math.sqrt(2.0)
    return CoefficientMatrix(np.array([[0.0, r], [-r, 0.0]], dtype=np.complex128))


def rotation_overlap(theta_deg: float, basis_id: int = ROTATED_BASIS_ID) -> ObservableBasis:
    """Spin-1/2 basis tilted by ``theta_deg`` from the reference axis."""
    theta_deg = float(theta_deg)
    if not math.isfinite(theta_deg):
        raise ValueError("angle must be finite")
    half = math.radians(theta_deg) / 2.0
    c = math.cos(half)
    s = math.sin(half)
    m = np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    return ObservableBasis(basis_id, m)


def singlet_joint_probability(theta_deg: float) -> JointDistribution:
    """Joint record probabilities for a singlet at relative angle theta."""
    k = k_matrix(singlet(), identity_basis(2), rotation_overlap(theta_deg))
    return joint_probability(k)


def correlation(theta_deg: float) -> float:
    """Product expectation of the two +-1 outcomes; equals -cos(theta)."""
    p = singlet_joint_probability(theta_deg).matrix
    return float(p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0])

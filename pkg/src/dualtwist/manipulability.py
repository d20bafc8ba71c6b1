"""Directional manipulability along the twist axis and related measures.

The directional value is the squared radius of the angular-velocity
ellipsoid along a unit direction k: 1 / (k^T (Jw Jw^T)^-1 k). Maximizing it
along the twisting axis maximizes the torque the arm can oppose about that
axis, since the velocity and force ellipsoids share principal axes with
reciprocal magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularConfigError
from .kinematics import Jacobian, Pose

UNIT_TOL = 1e-9
SINGULAR_EIG = 1e-12
NULL_COMPONENT_TOL = 1e-8


@dataclass(frozen=True)
class DirectionalManipulability:
    value: float
    direction: np.ndarray  # unit 3-vector
    frame: str = "base"  # base | end_effector


@dataclass(frozen=True)
class ManipulabilityFitness:
    f_m: float
    beta_left: float
    beta_right: float


def directional_manipulability(J_omega: np.ndarray, k: np.ndarray) -> float:
    """1 / (k^T (Jw Jw^T)^-1 k) for a unit direction k.

    A singular Jw Jw^T yields the limiting value: 0 when k has a component in
    the null space, otherwise the value computed on the range space.
    """
    k = np.asarray(k, dtype=float)
    if abs(np.linalg.norm(k) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be unit length, |k| = {np.linalg.norm(k)}")
    J_omega = np.asarray(J_omega, dtype=float)
    S = J_omega @ J_omega.T
    eigvals, eigvecs = np.linalg.eigh(S)
    coeffs = eigvecs.T @ k
    quad = 0.0
    for lam, c in zip(eigvals, coeffs):
        if lam <= SINGULAR_EIG:
            if abs(c) > NULL_COMPONENT_TOL:
                return 0.0
            continue
        quad += c * c / lam
    if quad <= 0.0:
        return 0.0
    return float(1.0 / quad)


def twist_axis_direction(ee_pose: Pose) -> np.ndarray:
    """The end-effector z axis expressed in the base frame."""
    return ee_pose.rotation[:, 2]


def manipulability_fitness(
    m_left: float, m_right: float, beta_left: float = 1.0, beta_right: float = 1.0
) -> float:
    """Weighted sum of reciprocals; lower is better."""
    if m_left <= 0.0 or m_right <= 0.0:
        raise SingularConfigError(
            f"manipulability must be positive to score a configuration, got ({m_left}, {m_right})"
        )
    return beta_left / m_left + beta_right / m_right


def singularity_measure(J: Jacobian | np.ndarray) -> float:
    """Yoshikawa measure sqrt(det(J J^T)); zero exactly at singularities.

    Generalizes the square-determinant condition to the 6x7 Jacobians of
    redundant arms.
    """
    M = J.full if isinstance(J, Jacobian) else np.asarray(J, dtype=float)
    g = float(np.linalg.det(M @ M.T))
    return math.sqrt(g) if g > 0.0 else 0.0

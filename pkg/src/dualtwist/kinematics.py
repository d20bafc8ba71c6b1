"""Serial-chain kinematics: forward/inverse kinematics and the geometric Jacobian.

A chain is a list of revolute joints. Joint i rotates about a unit axis
expressed in its own frame; a fixed rigid transform then leads to the frame
of joint i+1 (for the last joint, to the tool frame). ``base_transform``
places the first joint frame in the world.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UnreachableTargetError
from .transforms import (
    IDENTITY_QUAT,
    axis_angle_matrix,
    matrix_from_quat,
    quat_angle,
    quat_conjugate,
    quat_from_matrix,
    quat_mul,
    quat_normalize,
    rotvec_from_matrix,
)

AXIS_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class Joint:
    """One revolute joint: rotation axis, fixed transform to the next frame, limits."""

    axis: np.ndarray  # unit vector in this joint's frame
    to_next_rotation: np.ndarray  # 3x3, applied after the translation
    to_next_translation: np.ndarray  # meters, in this joint's (rotated) frame
    lower: float  # rad
    upper: float  # rad

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "to_next_rotation", np.asarray(self.to_next_rotation, dtype=float))
        object.__setattr__(
            self, "to_next_translation", np.asarray(self.to_next_translation, dtype=float)
        )
        if abs(np.linalg.norm(axis) - 1.0) > AXIS_UNIT_TOL:
            raise ConfigError(f"joint axis {axis} is not unit length")
        if not self.lower < self.upper:
            raise ConfigError(f"joint limits [{self.lower}, {self.upper}] are not ordered")


@dataclass(frozen=True)
class KinematicChain:
    """Serial chain of revolute joints plus the base placement in the world frame."""

    joints: tuple[Joint, ...]
    base_rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    base_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    name: str = "arm"

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "base_rotation", np.asarray(self.base_rotation, dtype=float))
        object.__setattr__(self, "base_position", np.asarray(self.base_position, dtype=float))
        if not self.joints:
            raise ConfigError("chain has no joints")

    @property
    def joint_count(self) -> int:
        return len(self.joints)

    @property
    def lower_limits(self) -> np.ndarray:
        return np.array([j.lower for j in self.joints])

    @property
    def upper_limits(self) -> np.ndarray:
        return np.array([j.upper for j in self.joints])

    @property
    def reach(self) -> float:
        """Upper bound on the tool distance from the first joint origin."""
        return float(sum(np.linalg.norm(j.to_next_translation) for j in self.joints))

    def clamp(self, angles: np.ndarray) -> np.ndarray:
        return np.clip(angles, self.lower_limits, self.upper_limits)


@dataclass
class JointConfig:
    """Joint-angle vector for one arm, radians."""

    angles: np.ndarray

    def __post_init__(self):
        self.angles = np.asarray(self.angles, dtype=float)

    def copy(self) -> "JointConfig":
        return JointConfig(self.angles.copy())


@dataclass
class Pose:
    """Position (m) and unit quaternion [w, x, y, z]."""

    position: np.ndarray
    quaternion: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        q = np.asarray(self.quaternion, dtype=float)
        n = float(np.linalg.norm(q))
        # keep already-unit quaternions bit-exact (trace replay round-trips)
        self.quaternion = q if abs(n - 1.0) <= 1e-12 else quat_normalize(q)

    @classmethod
    def from_matrix(cls, R: np.ndarray, p: np.ndarray) -> "Pose":
        return cls(np.asarray(p, dtype=float), quat_from_matrix(R))

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), IDENTITY_QUAT.copy())

    @property
    def rotation(self) -> np.ndarray:
        return matrix_from_quat(self.quaternion)

    def z_axis(self) -> np.ndarray:
        return self.rotation[:, 2]


@dataclass
class Jacobian:
    """Geometric Jacobian at the tool point, world frame."""

    linear: np.ndarray  # 3 x n
    angular: np.ndarray  # 3 x n

    @property
    def full(self) -> np.ndarray:
        return np.vstack([self.linear, self.angular])


def _check_config(chain: KinematicChain, q: JointConfig) -> np.ndarray:
    angles = np.asarray(q.angles, dtype=float)
    if angles.shape != (chain.joint_count,):
        raise ConfigError(
            f"config length {angles.shape} does not match chain with {chain.joint_count} joints"
        )
    return angles


def _frames(chain: KinematicChain, angles: np.ndarray):
    """Walk the chain, yielding per-joint world axes and origins plus the tool frame."""
    R = chain.base_rotation.copy()
    p = chain.base_position.copy()
    origins = [p.copy()]
    axes = []
    for joint, theta in zip(chain.joints, angles):
        axes.append(R @ joint.axis)
        R = R @ axis_angle_matrix(joint.axis, theta)
        p = p + R @ joint.to_next_translation
        R = R @ joint.to_next_rotation
        origins.append(p.copy())
    return np.array(origins), np.array(axes), R, p


def forward_kinematics(chain: KinematicChain, q: JointConfig) -> Pose:
    """Tool pose in the world frame."""
    angles = _check_config(chain, q)
    _, _, R, p = _frames(chain, angles)
    return Pose.from_matrix(R, p)


def joint_positions(chain: KinematicChain, q: JointConfig) -> np.ndarray:
    """World positions of the joint origins, base through tool: (n+1, 3)."""
    angles = _check_config(chain, q)
    origins, _, _, _ = _frames(chain, angles)
    return origins


def jacobian(chain: KinematicChain, q: JointConfig) -> Jacobian:
    """Geometric Jacobian: column i is (axis_i x (p_tool - p_i), axis_i)."""
    angles = _check_config(chain, q)
    origins, axes, _, p_tool = _frames(chain, angles)
    lin = np.cross(axes, p_tool - origins[:-1])
    return Jacobian(lin.T, axes.T)


def pose_error(current: Pose, target: Pose) -> float:
    """Scalar IK error: position distance (m) + 0.5 * orientation angle (rad)."""
    dp = float(np.linalg.norm(target.position - current.position))
    dq = quat_mul(target.quaternion, quat_conjugate(current.quaternion))
    return dp + 0.5 * quat_angle(dq)


def inverse_kinematics(
    chain: KinematicChain,
    target: Pose,
    seed: JointConfig,
    tol: float = 1e-4,
    max_iters: int = 100,
    damping: float = 0.01,
    step_limit: float = 0.5,
) -> JointConfig:
    """Damped-least-squares IK with per-iteration joint-limit clamping.

    Raises UnreachableTargetError when the error metric does not fall below
    ``tol`` within ``max_iters``; the exception carries the best residual and
    the best (limit-respecting) joint vector found.
    """
    if tol <= 0.0:
        raise ConfigError("tol must be positive")
    angles = chain.clamp(_check_config(chain, seed))

    # quick workspace reject: target beyond the fully stretched chain
    base_dist = float(np.linalg.norm(np.asarray(target.position) - chain.base_position))
    if base_dist > chain.reach + 1e-9:
        raise UnreachableTargetError(
            f"target {base_dist:.3f} m from base exceeds reach {chain.reach:.3f} m",
            residual=base_dist - chain.reach,
            best_angles=angles.copy(),
        )

    target_p = np.asarray(target.position, dtype=float)
    target_R = matrix_from_quat(target.quaternion)
    lam2 = damping * damping
    best = angles.copy()
    best_err = np.inf

    for it in range(max_iters + 1):
        origins, axes, R, p = _frames(chain, angles)
        dp = target_p - p
        rot_err = rotvec_from_matrix(target_R @ R.T)
        err = float(np.linalg.norm(dp)) + 0.5 * float(np.linalg.norm(rot_err))
        if err < best_err:
            best_err = err
            best = angles.copy()
        if err <= tol:
            return JointConfig(angles)
        if it == max_iters:
            break
        # one chain walk serves both the pose error and the Jacobian
        lin = np.cross(axes, p - origins[:-1]).T
        J = np.vstack([lin, axes.T])
        e = np.concatenate([dp, rot_err])
        A = J @ J.T + lam2 * np.eye(6)
        dq = J.T @ np.linalg.solve(A, e)
        peak = float(np.max(np.abs(dq)))
        if peak > step_limit:
            dq *= step_limit / peak
        angles = chain.clamp(angles + dq)

    raise UnreachableTargetError(
        f"IK did not converge: residual {best_err:.3e} > tol {tol:.1e}",
        residual=best_err,
        best_angles=best,
    )

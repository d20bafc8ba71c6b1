"""Kinematic model of the twisted object and the axis-alignment error metrics.

The object is a straight bar of length L between end points P1 and P2. A
grasped end tracks its gripper exactly; a single free end droops under
gravity by (1 - stiffness) * 90 deg scaled by the cosine of the grasped
axis elevation, the simplest map satisfying the rigid (no droop) and fully
soft (hangs vertical from a horizontal grasp) endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DegenerateGeometryError, GraspStateError, OverstretchError
from .kinematics import Pose
from .transforms import angle_between_vectors, axis_angle_matrix

OVERSTRETCH_TOL = 1e-6
DOWN = np.array([0.0, 0.0, -1.0])


class GraspedBy(Enum):
    FREE = "free"
    LEFT = "left"
    RIGHT = "right"


class AlignmentVariant(Enum):
    AXIS_TO_OBJECT = "axis_to_object"  # right tool axis vs object axis
    GRIP_LINE_TO_OBJECT = "grip_line_to_object"  # line between grippers vs object axis
    AXIS_TO_AXIS = "axis_to_axis"  # right tool axis vs left tool axis


# stiffness at or above this uses the grip-line variant (shape barely changes);
# softer objects compare the tool axes directly
STIFF_VARIANT_THRESHOLD = 0.7


@dataclass(frozen=True)
class AlignmentError:
    delta_deg: float
    variant: AlignmentVariant


@dataclass(frozen=True)
class TwistObject:
    length: float
    stiffness: float  # 0 soft .. 1 rigid
    p1: np.ndarray
    p2: np.ndarray
    end1_grasp: GraspedBy = GraspedBy.FREE
    end2_grasp: GraspedBy = GraspedBy.FREE
    misgrasp_offset_deg: float = 0.0  # grasp-pose perturbation applied to the held axis

    def __post_init__(self):
        object.__setattr__(self, "p1", np.asarray(self.p1, dtype=float))
        object.__setattr__(self, "p2", np.asarray(self.p2, dtype=float))
        if not 0.0 <= self.stiffness <= 1.0:
            raise ValueError(f"stiffness must be in [0, 1], got {self.stiffness}")
        if self.length <= 0.0:
            raise ValueError("object length must be positive")

    @property
    def axis(self) -> np.ndarray:
        return self.p2 - self.p1

    def grasp_count(self) -> int:
        return sum(g is not GraspedBy.FREE for g in (self.end1_grasp, self.end2_grasp))


def angle_between(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between two vectors in degrees, range [0, 180]."""
    try:
        return math.degrees(angle_between_vectors(u, v))
    except ValueError as exc:
        raise DegenerateGeometryError(str(exc))


def _effective_axis(gripper: Pose, misgrasp_offset_deg: float) -> np.ndarray:
    """Object direction held by a gripper: tool z, tilted by the misgrasp offset."""
    R = gripper.rotation
    axis = R[:, 2]
    if misgrasp_offset_deg != 0.0:
        axis = axis_angle_matrix(R[:, 0], math.radians(misgrasp_offset_deg)) @ axis
    return axis


def droop_angle_deg(axis: np.ndarray, stiffness: float) -> float:
    """Free-end droop below the grasp axis: (1 - s) * 90 deg * cos(elevation)."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n < 1e-12:
        raise DegenerateGeometryError("grasp axis is near zero")
    elevation = math.asin(max(-1.0, min(1.0, float(axis[2]) / n)))
    return (1.0 - stiffness) * 90.0 * math.cos(elevation)


def droop_direction(axis: np.ndarray, stiffness: float) -> np.ndarray:
    """Unit direction of the free end: the grasp axis rotated down by the droop angle."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    delta = droop_angle_deg(axis, stiffness)
    pivot = np.cross(axis, DOWN)
    pn = np.linalg.norm(pivot)
    if pn < 1e-12 or delta == 0.0:
        return axis
    return axis_angle_matrix(pivot / pn, math.radians(delta)) @ axis


def pendent_angle(obj: TwistObject, grasped_end_pose: Pose) -> float:
    """Droop angle of the free end in degrees; requires exactly one end grasped."""
    if obj.grasp_count() != 1:
        raise GraspStateError(
            f"pendent angle needs exactly one grasped end, have {obj.grasp_count()}"
        )
    axis = _effective_axis(grasped_end_pose, obj.misgrasp_offset_deg)
    return droop_angle_deg(axis, obj.stiffness)


def alignment_error(
    right_ee: Pose,
    left_ee: Pose,
    obj: TwistObject,
    variant: AlignmentVariant | None = None,
) -> AlignmentError:
    """Twist-axis alignment error for the chosen (or stiffness-selected) variant."""
    if variant is None:
        variant = (
            AlignmentVariant.GRIP_LINE_TO_OBJECT
            if obj.stiffness >= STIFF_VARIANT_THRESHOLD
            else AlignmentVariant.AXIS_TO_AXIS
        )
    if variant is AlignmentVariant.AXIS_TO_OBJECT:
        delta = angle_between(right_ee.rotation[:, 2], obj.axis)
    elif variant is AlignmentVariant.GRIP_LINE_TO_OBJECT:
        delta = angle_between(right_ee.position - left_ee.position, obj.axis)
    else:
        delta = angle_between(right_ee.rotation[:, 2], left_ee.rotation[:, 2])
    return AlignmentError(delta, variant)


def _gripper_for(end: GraspedBy, left_ee: Pose, right_ee: Pose) -> Pose:
    return left_ee if end is GraspedBy.LEFT else right_ee


def update_object(obj: TwistObject, left_ee: Pose, right_ee: Pose) -> TwistObject:
    """Advance object ends from the current gripper poses.

    Grasped ends copy their gripper position exactly; a single free end hangs
    along the drooped direction at distance L. Both-ends-grasped states are
    checked for overstretch.
    """
    grasped = obj.grasp_count()
    if grasped == 0:
        return obj
    if grasped == 2:
        p1 = _gripper_for(obj.end1_grasp, left_ee, right_ee).position.copy()
        p2 = _gripper_for(obj.end2_grasp, left_ee, right_ee).position.copy()
        span = float(np.linalg.norm(p2 - p1))
        if span > obj.length + OVERSTRETCH_TOL:
            raise OverstretchError(
                f"grasped ends {span:.4f} m apart exceed object length {obj.length:.4f} m"
            )
        return replace(obj, p1=p1, p2=p2)
    if obj.end1_grasp is not GraspedBy.FREE:
        holder = _gripper_for(obj.end1_grasp, left_ee, right_ee)
        p1 = holder.position.copy()
        direction = droop_direction(
            _effective_axis(holder, obj.misgrasp_offset_deg), obj.stiffness
        )
        return replace(obj, p1=p1, p2=p1 + obj.length * direction)
    # end 2 held: the free end lies opposite the tool axis (tool z runs P1 -> P2)
    holder = _gripper_for(obj.end2_grasp, left_ee, right_ee)
    p2 = holder.position.copy()
    direction = droop_direction(-_effective_axis(holder, obj.misgrasp_offset_deg), obj.stiffness)
    return replace(obj, p2=p2, p1=p2 + obj.length * direction)

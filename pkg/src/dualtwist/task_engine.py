"""Task state machine for the coordinated twisting sequence.

Phases: Initial (right arm approaches the object) -> GraspRight -> Transport
(object carried to the preparing location) -> AlignLeft (left arm teleoperated
to grasp the pendent end and align the twist axis) -> Twist -> Done, with
Aborted reachable from anywhere on a safety violation.

Per-gripper twist angles accumulate the executed per-tick rotations about
each tool's own roll axis: exact command increments for plan-driven arms,
measured body-z rotation for teleoperated ones. The alignment gate, not the
angle bookkeeping, guarantees the rotations share an axis to within the
alignment tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .collision import ArmSkeleton, min_arm_distance
from .errors import OverstretchError, UnreachableTargetError
from .kinematics import (
    JointConfig,
    KinematicChain,
    Pose,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
    joint_positions,
    pose_error,
)
from .manipulability import directional_manipulability
from .object_model import GraspedBy, TwistObject, alignment_error, update_object
from .scenario import Scenario
from .teleop import MasterCommand, WorkspaceMap, map_master_to_slave, slave_target_config
from .transforms import (
    angle_between_vectors,
    frame_from_z,
    quat_conjugate,
    quat_from_axis_angle,
    quat_from_matrix,
    quat_mul,
    rotvec_from_matrix,
    rotvec_from_quat,
)

GRASP_FRAME_HINT = np.array([0.0, 0.0, -1.0])


class Phase(Enum):
    INITIAL = "Initial"
    GRASP_RIGHT = "GraspRight"
    TRANSPORT = "Transport"
    ALIGN_LEFT = "AlignLeft"
    TWIST = "Twist"
    DONE = "Done"
    ABORTED = "Aborted"


TERMINAL_PHASES = (Phase.DONE, Phase.ABORTED)

# phases in which left-arm motion comes from the operator
TELEOP_PHASES = (Phase.ALIGN_LEFT, Phase.TWIST)


@dataclass(frozen=True)
class TwistPlan:
    right_target_deg: float
    left_target_deg: float
    total_deg: float
    rate_deg_per_tick: float

    def __post_init__(self):
        if abs(self.left_target_deg - self.right_target_deg) < self.total_deg - 1e-12:
            raise ValueError("twist targets span less than the completion threshold")
        if self.rate_deg_per_tick <= 0.0:
            raise ValueError("twist rate must be positive")


@dataclass(frozen=True)
class Metrics:
    delta_deg: float
    d_min: float
    closest_pair: tuple[int, int]
    witness_left: np.ndarray
    witness_right: np.ndarray
    theta_t_deg: float
    m_left: float
    m_right: float
    f_m: float


@dataclass(frozen=True)
class TaskState:
    phase: Phase
    tick: int
    metrics: Metrics
    theta_left_deg: float
    theta_right_deg: float
    last_verdict: str = ""
    abort_reason: str = ""


@dataclass(frozen=True)
class LiftCommand:
    """Control command moving GraspRight on to Transport."""


def twist_progress(right_deg: float, left_deg: float) -> float:
    """Relative twist angle |theta_L - theta_R| in degrees."""
    return abs(left_deg - right_deg)


def _advance_pose(current: Pose, goal: Pose, lin_step: float, ang_step: float) -> Pose:
    """One rate-limited waypoint from current toward goal (straight line + slerp)."""
    dp = goal.position - current.position
    dist = float(np.linalg.norm(dp))
    position = goal.position if dist <= lin_step else current.position + dp * (lin_step / dist)
    dq = quat_mul(goal.quaternion, quat_conjugate(current.quaternion))
    rv = rotvec_from_quat(dq)
    angle = float(np.linalg.norm(rv))
    if angle <= ang_step:
        quaternion = goal.quaternion
    else:
        quaternion = quat_mul(quat_from_axis_angle(rv / angle, ang_step), current.quaternion)
    return Pose(position, quaternion)


class TaskEngine:
    """Single-writer tick loop over the dual-arm world."""

    def __init__(
        self,
        scenario: Scenario,
        left_chain: KinematicChain | None = None,
        right_chain: KinematicChain | None = None,
    ):
        self.scenario = scenario
        if left_chain is None or right_chain is None:
            left_chain, right_chain = scenario.load_chains()
        self.left_chain = left_chain
        self.right_chain = right_chain
        self.plan = TwistPlan(
            right_target_deg=scenario.twist.right_target_deg,
            left_target_deg=scenario.twist.left_target_deg,
            total_deg=scenario.twist.total_deg,
            rate_deg_per_tick=scenario.twist.rate_deg_per_tick,
        )
        self.d_thr = scenario.collision_threshold
        self.reset()

    # -- world construction -------------------------------------------------

    def reset(self):
        sc = self.scenario
        self.tick = 0
        self.phase = Phase.INITIAL
        self.left_q, self.right_q = sc.initial_configs()
        self.left_q = JointConfig(self.left_chain.clamp(self.left_q.angles))
        self.right_q = JointConfig(self.right_chain.clamp(self.right_q.angles))
        self.left_pose = forward_kinematics(self.left_chain, self.left_q)
        self.right_pose = forward_kinematics(self.right_chain, self.right_q)
        axis = np.asarray(sc.obj.axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        self.object = TwistObject(
            length=sc.obj.length,
            stiffness=sc.obj.stiffness,
            p1=sc.obj.p1.copy(),
            p2=sc.obj.p1 + sc.obj.length * axis,
            misgrasp_offset_deg=sc.obj.misgrasp_offset_deg,
        )
        self.grasp_pose = Pose(
            sc.obj.p1.copy(), quat_from_matrix(frame_from_z(axis, GRASP_FRAME_HINT))
        )
        self.hold_pose = Pose(sc.task.prepare_position.copy(), self.grasp_pose.quaternion.copy())
        self.left_gripper = 0.0
        self.right_gripper = 0.0
        self.workspace_map = WorkspaceMap(
            scale=sc.teleop.scale,
            offset_rotation=self._offset_rotation(),
        )
        self.theta_left = 0.0
        self.theta_right = 0.0
        self.lift_requested = False
        self.last_verdict = ""
        self.abort_reason = ""
        self._left_tool_rotation = self.left_pose.rotation
        self.metrics = self._compute_metrics()
        self.state = self._make_state()

    def _offset_rotation(self):
        from .transforms import rpy_matrix

        r, p, y = [float(v) for v in self.scenario.teleop.offset_rpy]
        return rpy_matrix(r, p, y)

    # -- public stepping -----------------------------------------------------

    def step(self, commands: tuple = ()) -> TaskState:
        """Advance one tick: drain commands, move arms, update object, gate phases."""
        if self.phase in TERMINAL_PHASES:
            self.tick += 1
            self.state = self._make_state()
            return self.state
        self.tick += 1
        self.last_verdict = ""
        overstretch = None
        for cmd in commands:
            self._apply_command(cmd)
        try:
            self._advance_right_arm()
            self._advance_left_plan()
            self._track_object()
        except OverstretchError as exc:
            overstretch = str(exc)
        self.metrics = self._compute_metrics()
        self._transition(overstretch)
        self.state = self._make_state()
        return self.state

    # -- command handling ----------------------------------------------------

    def _apply_command(self, cmd):
        if isinstance(cmd, LiftCommand):
            if self.phase is Phase.GRASP_RIGHT:
                self.lift_requested = True
                self.last_verdict = "ok: lift"
            else:
                self.last_verdict = "rejected: lift outside GraspRight"
            return
        if not isinstance(cmd, MasterCommand):
            self.last_verdict = f"rejected: unknown command {type(cmd).__name__}"
            return
        if self.phase not in TELEOP_PHASES:
            self.last_verdict = "rejected: phase"
            return
        if self.phase is Phase.TWIST and self.scenario.twist.left_source == "plan":
            self.last_verdict = "rejected: phase"
            return

        if cmd.clutch and not self.workspace_map.engaged:
            self.workspace_map.engage(cmd.pose, self.left_pose)
        elif not cmd.clutch and self.workspace_map.engaged:
            self.workspace_map.disengage()

        verdicts = []
        target = map_master_to_slave(cmd, self.workspace_map)
        if target is not None:
            verdicts.append(self._apply_left_target(target))
        else:
            verdicts.append("no-motion: clutch disengaged" if not cmd.clutch else "no-motion")
        verdicts.append(self._apply_gripper(cmd))
        self.last_verdict = "; ".join(v for v in verdicts if v)

    def _apply_left_target(self, target: Pose) -> str:
        sc = self.scenario
        config, verdict = slave_target_config(
            target,
            self.left_q,
            self.left_chain,
            step_bound=sc.teleop.step_bound,
            singularity_floor=sc.teleop.singularity_floor,
        )
        if config is None:
            return verdict
        candidate_points = joint_positions(self.left_chain, config)
        report = min_arm_distance(
            ArmSkeleton(candidate_points),
            ArmSkeleton(joint_positions(self.right_chain, self.right_q)),
            skip_adjacent_to_grasp=sc.skip_gripper_segments,
        )
        if report.d_min < self.d_thr:
            return f"rejected: collision clearance {report.d_min:.4f} < {self.d_thr:.4f}"
        new_pose = forward_kinematics(self.left_chain, config)
        if self.phase is Phase.TWIST:
            body = self._left_tool_rotation.T @ new_pose.rotation
            self.theta_left += math.degrees(rotvec_from_matrix(body)[2])
        self.left_q = config
        self.left_pose = new_pose
        self._left_tool_rotation = new_pose.rotation
        return "ok"

    def _apply_gripper(self, cmd: MasterCommand) -> str:
        if cmd.close_requested and self.left_gripper < 1.0:
            if self.object.end2_grasp is not GraspedBy.FREE:
                return ""
            sc = self.scenario
            pos_err = float(np.linalg.norm(self.left_pose.position - self.object.p2))
            axis = self.object.axis
            z_err = math.degrees(angle_between_vectors(self.left_pose.rotation[:, 2], axis))
            if pos_err <= sc.task.grasp_tolerance_pos and z_err <= sc.task.grasp_tolerance_deg:
                self.left_gripper = 1.0
                self.object = replace(self.object, end2_grasp=GraspedBy.LEFT)
                return "grasped P2"
            return (
                f"rejected: not at grasp (pos {pos_err * 1000:.1f} mm, z {z_err:.1f} deg)"
            )
        if not cmd.close_requested and self.left_gripper >= 1.0:
            if self.object.end2_grasp is not GraspedBy.FREE:
                return "rejected: release not supported while grasping"
            self.left_gripper = 0.0
        return ""

    # -- planned motion --------------------------------------------------------

    def right_arm_plan(self) -> JointConfig | None:
        """Joint target for the right arm this tick, None when holding."""
        sc = self.scenario
        if self.phase is Phase.INITIAL:
            goal = self.grasp_pose
        elif self.phase is Phase.TRANSPORT:
            goal = self.hold_pose
        elif self.phase is Phase.TWIST:
            return self._twist_step_config(
                self.right_chain, self.right_q, self.theta_right, self.plan.right_target_deg
            )[0]
        else:
            return None
        if pose_error(self.right_pose, goal) <= 1e-6:
            return None
        waypoint = _advance_pose(
            self.right_pose,
            goal,
            sc.task.linear_speed,
            math.radians(sc.task.angular_speed_deg),
        )
        return inverse_kinematics(self.right_chain, waypoint, self.right_q, max_iters=80)

    def _twist_step_config(self, chain, config, accumulated, target_deg):
        """Rate-limited wrist-roll increment toward the signed twist target."""
        remaining = target_deg - accumulated
        if remaining == 0.0:
            return None, 0.0
        step = math.copysign(min(abs(remaining), self.plan.rate_deg_per_tick), remaining)
        angles = config.angles.copy()
        rolled = angles[-1] + math.radians(step)
        if not chain.lower_limits[-1] <= rolled <= chain.upper_limits[-1]:
            return None, 0.0  # roll limit reached; hold rather than violate
        angles[-1] = rolled
        return JointConfig(angles), step

    def _advance_right_arm(self):
        if self.phase in (Phase.GRASP_RIGHT, Phase.ALIGN_LEFT):
            return
        if self.phase is Phase.TWIST:
            config, step = self._twist_step_config(
                self.right_chain, self.right_q, self.theta_right, self.plan.right_target_deg
            )
            if config is not None:
                self.right_q = config
                self.right_pose = forward_kinematics(self.right_chain, self.right_q)
                self.theta_right += step
            return
        try:
            target = self.right_arm_plan()
        except UnreachableTargetError as exc:
            self.phase = Phase.ABORTED
            self.abort_reason = f"right arm target unreachable: {exc}"
            return
        if target is None:
            return
        self.right_q = target
        self.right_pose = forward_kinematics(self.right_chain, self.right_q)
        if self.phase is Phase.INITIAL and self.scenario.task.auto_grasp:
            self._try_right_grasp()

    def _try_right_grasp(self):
        sc = self.scenario
        pos_err = float(np.linalg.norm(self.right_pose.position - self.grasp_pose.position))
        dq = quat_mul(self.grasp_pose.quaternion, quat_conjugate(self.right_pose.quaternion))
        ang_err = math.degrees(float(np.linalg.norm(rotvec_from_quat(dq))))
        if pos_err <= sc.task.grasp_tolerance_pos and ang_err <= sc.task.grasp_tolerance_deg:
            self.right_gripper = 1.0
            self.object = replace(self.object, end1_grasp=GraspedBy.RIGHT)

    def _advance_left_plan(self):
        if self.phase is not Phase.TWIST or self.scenario.twist.left_source != "plan":
            return
        config, step = self._twist_step_config(
            self.left_chain, self.left_q, self.theta_left, self.plan.left_target_deg
        )
        if config is not None:
            self.left_q = config
            self.left_pose = forward_kinematics(self.left_chain, self.left_q)
            self._left_tool_rotation = self.left_pose.rotation
            self.theta_left += step

    # -- world bookkeeping -----------------------------------------------------

    def _track_object(self):
        self.object = update_object(self.object, self.left_pose, self.right_pose)

    def _compute_metrics(self) -> Metrics:
        report = min_arm_distance(
            ArmSkeleton(joint_positions(self.left_chain, self.left_q)),
            ArmSkeleton(joint_positions(self.right_chain, self.right_q)),
            skip_adjacent_to_grasp=self.scenario.skip_gripper_segments,
        )
        delta = alignment_error(self.right_pose, self.left_pose, self.object).delta_deg
        m_left = directional_manipulability(
            jacobian(self.left_chain, self.left_q).angular, self.left_pose.rotation[:, 2]
        )
        m_right = directional_manipulability(
            jacobian(self.right_chain, self.right_q).angular, self.right_pose.rotation[:, 2]
        )
        opt = self.scenario.optimization
        if m_left > 0.0 and m_right > 0.0:
            f_m = opt.beta_left / m_left + opt.beta_right / m_right
        else:
            f_m = float("inf")
        return Metrics(
            delta_deg=delta,
            d_min=report.d_min,
            closest_pair=report.closest_pair,
            witness_left=report.witness_left,
            witness_right=report.witness_right,
            theta_t_deg=twist_progress(self.theta_right, self.theta_left),
            m_left=m_left,
            m_right=m_right,
            f_m=f_m,
        )

    # -- phase transitions -------------------------------------------------------

    def _transition(self, overstretch: str | None):
        sc = self.scenario
        if overstretch is not None:
            self.phase = Phase.ABORTED
            self.abort_reason = overstretch
            return
        if self.metrics.d_min < self.d_thr:
            self.phase = Phase.ABORTED
            self.abort_reason = (
                f"collision: d_min {self.metrics.d_min:.4f} m below threshold {self.d_thr:.4f} m"
            )
            return
        if self.phase is Phase.INITIAL:
            if self.object.end1_grasp is GraspedBy.RIGHT and self.right_gripper >= 1.0:
                self.phase = Phase.GRASP_RIGHT
                if sc.task.auto_lift:
                    self.lift_requested = True
        elif self.phase is Phase.GRASP_RIGHT:
            if self.lift_requested:
                self.phase = Phase.TRANSPORT
        elif self.phase is Phase.TRANSPORT:
            if (
                float(np.linalg.norm(self.object.p1 - sc.task.prepare_position))
                <= sc.task.arrive_tolerance
            ):
                self.phase = Phase.ALIGN_LEFT
        elif self.phase is Phase.ALIGN_LEFT:
            if (
                self.object.end2_grasp is GraspedBy.LEFT
                and self.metrics.delta_deg <= sc.task.alignment_tolerance_deg
            ):
                self.phase = Phase.TWIST
                self._left_tool_rotation = self.left_pose.rotation
        elif self.phase is Phase.TWIST:
            if self.metrics.theta_t_deg >= self.plan.total_deg:
                self.phase = Phase.DONE

    def _make_state(self) -> TaskState:
        return TaskState(
            phase=self.phase,
            tick=self.tick,
            metrics=self.metrics,
            theta_left_deg=self.theta_left,
            theta_right_deg=self.theta_right,
            last_verdict=self.last_verdict,
            abort_reason=self.abort_reason,
        )

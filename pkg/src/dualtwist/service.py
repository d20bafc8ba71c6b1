"""Session host: headless scenario runs, state snapshots, and the metrics log.

Headless runs are bit-reproducible: the loop is pure computation driven by
the scenario and trace, and every float in the metrics log is written with
repr so equal runs produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .scenario import Scenario, load_scenario
from .task_engine import Phase, TaskEngine, TaskState
from .teleop import MasterCommand, read_trace

METRICS_COLUMNS = (
    ["tick", "phase", "delta_deg", "d_min", "theta_t_deg", "m_left", "m_right"]
    + [f"l{i}" for i in range(7)]
    + [f"r{i}" for i in range(7)]
)

EXIT_DONE = 0
EXIT_NOT_DONE = 2
EXIT_INPUT_ERROR = 3


@dataclass
class SessionConfig:
    scenario_path: Path
    left_arm: Path | None = None
    right_arm: Path | None = None
    trace: Path | None = None
    metrics_out: Path | None = None
    record: Path | None = None
    listen: str = "127.0.0.1:8765"
    tick_rate: float | None = None
    max_ticks: int | None = None
    mode: str = "headless"  # headless | interactive


@dataclass
class StateSnapshot:
    tick: int
    phase: str
    left_angles: list[float]
    right_angles: list[float]
    left_points: list[list[float]]  # joint origins base..tool, for skeleton drawing
    right_points: list[list[float]]
    left_gripper: float
    right_gripper: float
    object_p1: list[float]
    object_p2: list[float]
    object_axis: list[float]
    end1_grasp: str
    end2_grasp: str
    delta_deg: float
    d_min: float
    closest_pair: tuple[int, int]
    witness_left: list[float]
    witness_right: list[float]
    theta_t_deg: float
    m_left: float
    m_right: float
    f_m: float
    d_thr: float
    delta_tor_deg: float
    theta_total_deg: float
    last_verdict: str
    abort_reason: str


def snapshot_from_engine(engine: TaskEngine) -> StateSnapshot:
    from .kinematics import joint_positions

    m = engine.metrics
    obj = engine.object
    axis = obj.axis
    left_pts = joint_positions(engine.left_chain, engine.left_q)
    right_pts = joint_positions(engine.right_chain, engine.right_q)
    return StateSnapshot(
        tick=engine.tick,
        phase=engine.phase.value,
        left_angles=[float(a) for a in engine.left_q.angles],
        right_angles=[float(a) for a in engine.right_q.angles],
        left_points=[[float(v) for v in p] for p in left_pts],
        right_points=[[float(v) for v in p] for p in right_pts],
        left_gripper=float(engine.left_gripper),
        right_gripper=float(engine.right_gripper),
        object_p1=[float(v) for v in obj.p1],
        object_p2=[float(v) for v in obj.p2],
        object_axis=[float(v) for v in axis],
        end1_grasp=obj.end1_grasp.value,
        end2_grasp=obj.end2_grasp.value,
        delta_deg=float(m.delta_deg),
        d_min=float(m.d_min),
        closest_pair=m.closest_pair,
        witness_left=[float(v) for v in m.witness_left],
        witness_right=[float(v) for v in m.witness_right],
        theta_t_deg=float(m.theta_t_deg),
        m_left=float(m.m_left),
        m_right=float(m.m_right),
        f_m=float(m.f_m),
        d_thr=float(engine.d_thr),
        delta_tor_deg=float(engine.scenario.task.alignment_tolerance_deg),
        theta_total_deg=float(engine.scenario.twist.total_deg),
        last_verdict=engine.last_verdict,
        abort_reason=engine.abort_reason,
    )


def _metrics_row(engine: TaskEngine) -> str:
    m = engine.metrics
    values = [str(engine.tick), engine.phase.value]
    values += [repr(float(v)) for v in (m.delta_deg, m.d_min, m.theta_t_deg, m.m_left, m.m_right)]
    values += [repr(float(a)) for a in engine.left_q.angles]
    values += [repr(float(a)) for a in engine.right_q.angles]
    return ",".join(values)


class MetricsLog:
    """Accumulates one CSV row per tick; written to disk at the end of a run."""

    def __init__(self):
        self.lines = [",".join(METRICS_COLUMNS)]

    def append(self, engine: TaskEngine):
        self.lines.append(_metrics_row(engine))

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def write(self, path: str | Path):
        Path(path).write_text(self.text())


@dataclass
class HeadlessResult:
    exit_code: int
    final_state: TaskState
    ticks: int
    min_d_min: float
    max_delta_twist: float  # max alignment error over Twist-phase ticks, -inf if none
    metrics_text: str
    summary: str


def group_trace_by_tick(commands: list[MasterCommand]) -> dict[int, list[MasterCommand]]:
    grouped: dict[int, list[MasterCommand]] = {}
    for cmd in commands:
        grouped.setdefault(cmd.tick, []).append(cmd)
    return grouped


def run_headless(config: SessionConfig) -> HeadlessResult:
    """Run a scenario to completion against its trace and collect the metrics log."""
    scenario = load_scenario(config.scenario_path, config.left_arm, config.right_arm)
    trace_path = config.trace or scenario.teleop.trace
    if trace_path is None:
        raise ConfigError("headless mode requires a trace-backed scenario")
    commands = read_trace(trace_path)
    return run_engine(
        TaskEngine(scenario),
        commands,
        max_ticks=config.max_ticks or scenario.service.max_ticks,
        metrics_out=config.metrics_out,
    )


def run_engine(
    engine: TaskEngine,
    commands: list[MasterCommand],
    max_ticks: int,
    metrics_out: str | Path | None = None,
) -> HeadlessResult:
    grouped = group_trace_by_tick(commands)
    last_command_tick = max(grouped) if grouped else -1
    log = MetricsLog()
    log.append(engine)
    min_d = engine.metrics.d_min
    max_delta_twist = float("-inf")
    teleop_twist = engine.scenario.twist.left_source == "teleop"

    while engine.phase not in (Phase.DONE, Phase.ABORTED) and engine.tick < max_ticks:
        state = engine.step(tuple(grouped.get(engine.tick + 1, ())))
        log.append(engine)
        min_d = min(min_d, state.metrics.d_min)
        if state.phase is Phase.TWIST:
            max_delta_twist = max(max_delta_twist, state.metrics.delta_deg)
        if state.phase in (Phase.DONE, Phase.ABORTED):
            break
        # a trace can only stall phases that need operator input
        operator_needed = state.phase is Phase.ALIGN_LEFT or (
            state.phase is Phase.TWIST and teleop_twist
        )
        if operator_needed and engine.tick > last_command_tick:
            break

    state = engine.state
    exit_code = EXIT_DONE if state.phase is Phase.DONE else EXIT_NOT_DONE
    summary = (
        f"phase={state.phase.value} ticks={engine.tick} "
        f"theta_t={state.metrics.theta_t_deg:.2f} deg "
        f"min_d_min={min_d:.4f} m "
        f"max_delta_twist={max_delta_twist if max_delta_twist > float('-inf') else float('nan'):.2f} deg"
    )
    if state.abort_reason:
        summary += f" abort_reason={state.abort_reason!r}"
    if metrics_out is not None:
        log.write(metrics_out)
    return HeadlessResult(
        exit_code=exit_code,
        final_state=state,
        ticks=engine.tick,
        min_d_min=min_d,
        max_delta_twist=max_delta_twist,
        metrics_text=log.text(),
        summary=summary,
    )


def twist_problem_from_scenario(scenario: Scenario):
    """Optimization problem for the scenario's twist poses.

    The right arm holds the grasped end at the preparing position; the left
    target grasps the opposite end of the reconstructed cylinder with the
    same tool-axis orientation.
    """
    from .config_opt import OptimizationProblem
    from .kinematics import JointConfig, Pose
    from .task_engine import GRASP_FRAME_HINT
    from .transforms import frame_from_z, quat_from_matrix

    left_chain, right_chain = scenario.load_chains()
    axis = np.asarray(scenario.obj.axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    quat = quat_from_matrix(frame_from_z(axis, GRASP_FRAME_HINT))
    right_target = Pose(scenario.task.prepare_position.copy(), quat.copy())
    left_target = Pose(scenario.task.prepare_position + scenario.obj.length * axis, quat.copy())
    opt = scenario.optimization
    return OptimizationProblem(
        left_chain=left_chain,
        right_chain=right_chain,
        left_initial=JointConfig(scenario.left_initial.copy()),
        right_initial=JointConfig(scenario.right_initial.copy()),
        left_target=left_target,
        right_target=right_target,
        beta_left=opt.beta_left,
        beta_right=opt.beta_right,
        lambda_m=opt.lambda_m,
        eps_singular=opt.singularity_floor,
        d_thr=scenario.collision_threshold,
        seed_count=opt.seed_count,
        redundant_joint=opt.redundant_joint,
        skip_gripper_segments=scenario.skip_gripper_segments,
    )


def recompute_snapshot_metrics(snapshot: StateSnapshot, scenario: Scenario) -> dict:
    """Independent recomputation of the snapshot metrics from its configs/object."""
    from .collision import ArmSkeleton, min_arm_distance
    from .kinematics import JointConfig, forward_kinematics, jacobian, joint_positions
    from .manipulability import directional_manipulability
    from .object_model import GraspedBy, TwistObject, alignment_error

    left_chain, right_chain = scenario.load_chains()
    lq = JointConfig(np.array(snapshot.left_angles))
    rq = JointConfig(np.array(snapshot.right_angles))
    left_pose = forward_kinematics(left_chain, lq)
    right_pose = forward_kinematics(right_chain, rq)
    obj = TwistObject(
        length=scenario.obj.length,
        stiffness=scenario.obj.stiffness,
        p1=np.array(snapshot.object_p1),
        p2=np.array(snapshot.object_p2),
        end1_grasp=GraspedBy(snapshot.end1_grasp),
        end2_grasp=GraspedBy(snapshot.end2_grasp),
    )
    report = min_arm_distance(
        ArmSkeleton(joint_positions(left_chain, lq)),
        ArmSkeleton(joint_positions(right_chain, rq)),
        skip_adjacent_to_grasp=scenario.skip_gripper_segments,
    )
    return {
        "delta_deg": alignment_error(right_pose, left_pose, obj).delta_deg,
        "d_min": report.d_min,
        "m_left": directional_manipulability(
            jacobian(left_chain, lq).angular, left_pose.rotation[:, 2]
        ),
        "m_right": directional_manipulability(
            jacobian(right_chain, rq).angular, right_pose.rotation[:, 2]
        ),
    }

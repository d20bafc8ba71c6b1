#!/usr/bin/env python3
"""Generate the committed reference alignment trace.

Runs the reference scenario closed-loop and scripts the operator: approach
the pendent object end, grasp it slightly inside the droop sphere (so the
grasp snap cannot overstretch), then drag it onto the right tool axis with
a pure geodesic tilt (no wrist roll travel). The resulting master commands
are written as a standard trace file that replays deterministically.
"""

import math
import sys
from pathlib import Path

import numpy as np

from dualtwist.kinematics import Pose
from dualtwist.object_model import GraspedBy
from dualtwist.scenario import default_scenario_path, load_scenario
from dualtwist.task_engine import Phase, TaskEngine, _advance_pose
from dualtwist.teleop import MasterCommand, write_trace
from dualtwist.transforms import (
    angle_between_vectors,
    axis_angle_matrix,
    frame_from_z,
    quat_from_matrix,
)

GRASP_RADIUS_FRACTION = 0.97  # grasp point along the droop direction
ALIGN_RADIUS_FRACTION = 0.96  # final |P1 P2| as a fraction of the object length
APPROACH_STEP = (0.0025, math.radians(1.3))
DRAG_STEP = (0.002, math.radians(1.2))


def master_pose_for(desired_slave: Pose, wmap) -> Pose:
    """Invert the workspace map: the master pose whose mapping hits desired_slave."""
    R_off = wmap.offset_rotation
    dp = (desired_slave.position - wmap.anchor_slave.position) / wmap.scale
    position = wmap.anchor_master.position + R_off.T @ dp
    dR = desired_slave.rotation @ wmap.anchor_slave.rotation.T
    rotation = R_off.T @ dR @ R_off @ wmap.anchor_master.rotation
    return Pose(position, quat_from_matrix(rotation))


def main():
    scenario = load_scenario(default_scenario_path())
    engine = TaskEngine(scenario)
    commands = []
    min_d = engine.metrics.d_min

    def send(pose: Pose, gripper: float, clutch: bool = True) -> str:
        cmd = MasterCommand(tick=engine.tick + 1, pose=pose, gripper=gripper, clutch=clutch)
        commands.append(cmd)
        state = engine.step((cmd,))
        nonlocal min_d
        min_d = min(min_d, state.metrics.d_min)
        return state.last_verdict

    # autonomous phases: right arm picks and carries the object
    while engine.phase not in (Phase.ALIGN_LEFT, Phase.ABORTED) and engine.tick < 1000:
        engine.step(())
        min_d = min(min_d, engine.metrics.d_min)
    assert engine.phase is Phase.ALIGN_LEFT, f"stuck in {engine.phase}"

    # engage the clutch; anchors capture the current master and slave poses
    master_rest = Pose.identity()
    verdict = send(master_rest, 0.0, clutch=True)
    wmap = engine.workspace_map
    assert wmap.engaged, verdict

    droop_dir = engine.object.axis / np.linalg.norm(engine.object.axis)
    grasp_position = engine.object.p1 + GRASP_RADIUS_FRACTION * scenario.obj.length * droop_dir
    # roll the grasp frame so the wrist works far from its joint-7 limit
    grasp_R = axis_angle_matrix(droop_dir, math.pi) @ frame_from_z(droop_dir)
    grasp_pose = Pose(grasp_position, quat_from_matrix(grasp_R))

    def drive_to(goal: Pose, step, gripper: float, stop=None, limit=600):
        for _ in range(limit):
            if stop is not None and stop():
                return
            current = engine.left_pose
            if (
                np.linalg.norm(current.position - goal.position) < 1e-5
                and angle_between_vectors(current.rotation[:, 2], goal.rotation[:, 2]) < 1e-4
                and angle_between_vectors(current.rotation[:, 0], goal.rotation[:, 0]) < 1e-4
            ):
                return
            waypoint = _advance_pose(current, goal, step[0], step[1])
            verdict = send(master_pose_for(waypoint, wmap), gripper)
            assert "rejected" not in verdict, f"tick {engine.tick}: {verdict}"
        raise RuntimeError(f"goal not reached within {limit} ticks")

    drive_to(grasp_pose, APPROACH_STEP, gripper=0.0)

    # close the gripper at the grasp point
    verdict = send(master_pose_for(grasp_pose, wmap), 1.0)
    assert engine.object.end2_grasp is GraspedBy.LEFT, verdict

    # drag the end onto the right tool axis: pure tilt, no roll about the tool
    u = engine.right_pose.rotation[:, 2]
    held_R = engine.left_pose.rotation
    held_z = held_R[:, 2]
    tilt_axis = np.cross(held_z, u)
    tilt_axis /= np.linalg.norm(tilt_axis)
    final_R = axis_angle_matrix(tilt_axis, angle_between_vectors(held_z, u)) @ held_R
    final_position = engine.object.p1 + ALIGN_RADIUS_FRACTION * scenario.obj.length * u
    final_pose = Pose(final_position, quat_from_matrix(final_R))

    drive_to(final_pose, DRAG_STEP, gripper=1.0, stop=lambda: engine.phase is Phase.TWIST)
    assert engine.phase is Phase.TWIST, f"alignment never gated: delta={engine.metrics.delta_deg}"
    align_tick = engine.tick

    # run out the twist autonomously
    while engine.phase not in (Phase.DONE, Phase.ABORTED) and engine.tick < 2000:
        engine.step(())
        min_d = min(min_d, engine.metrics.d_min)

    print(f"final phase: {engine.phase.value} at tick {engine.tick} (twist from {align_tick})")
    print(f"theta_t = {engine.metrics.theta_t_deg:.3f} deg, delta = {engine.metrics.delta_deg:.3f} deg")
    print(f"min d_min over run = {min_d:.4f} (threshold {engine.d_thr:.4f})")
    assert engine.phase is Phase.DONE

    out = Path(__file__).resolve().parents[1] / "src/dualtwist/data/traces/reference_alignment.trace"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trace(out, commands)
    print(f"wrote {len(commands)} commands to {out}")


if __name__ == "__main__":
    sys.exit(main())

"""Master-to-slave command mapping with clutching, plus trace record/replay.

While the clutch is engaged, master pose deltas relative to the engage
anchor are applied to the slave anchor: position deltas scaled, orientation
deltas applied unscaled. Re-engaging re-anchors at the current slave pose,
so the slave target never jumps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import TraceFormatError, UnreachableTargetError
from .kinematics import JointConfig, KinematicChain, Pose, inverse_kinematics, jacobian
from .manipulability import singularity_measure
from .transforms import quat_from_matrix

GRIP_CLOSE_THRESHOLD = 0.5
TRACE_HEADER = "# dualtwist-trace v1: tick px py pz qw qx qy qz gripper clutch"


@dataclass
class MasterCommand:
    tick: int
    pose: Pose
    gripper: float  # 0 open .. 1 closed
    clutch: bool

    def __post_init__(self):
        if not 0.0 <= self.gripper <= 1.0:
            raise ValueError(f"gripper must be in [0, 1], got {self.gripper}")

    @property
    def close_requested(self) -> bool:
        return self.gripper >= GRIP_CLOSE_THRESHOLD


@dataclass
class WorkspaceMap:
    """Master-workspace to slave-workspace mapping with clutch anchors."""

    scale: float = 1.0
    offset_rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    anchor_master: Pose | None = None
    anchor_slave: Pose | None = None

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError("workspace scale must be positive")
        self.offset_rotation = np.asarray(self.offset_rotation, dtype=float)

    @property
    def engaged(self) -> bool:
        return self.anchor_master is not None

    def engage(self, master_pose: Pose, slave_pose: Pose):
        self.anchor_master = master_pose
        self.anchor_slave = slave_pose

    def disengage(self):
        self.anchor_master = None
        self.anchor_slave = None


def map_master_to_slave(cmd: MasterCommand, wmap: WorkspaceMap) -> Pose | None:
    """Slave target pose for a master command, or None while disengaged."""
    if not cmd.clutch or not wmap.engaged:
        return None
    R_off = wmap.offset_rotation
    dp = R_off @ (cmd.pose.position - wmap.anchor_master.position)
    position = wmap.anchor_slave.position + wmap.scale * dp
    dR = R_off @ (cmd.pose.rotation @ wmap.anchor_master.rotation.T) @ R_off.T
    rotation = dR @ wmap.anchor_slave.rotation
    return Pose(position, quat_from_matrix(rotation))


def slave_target_config(
    x_s: Pose,
    current: JointConfig,
    chain: KinematicChain,
    step_bound: float = 0.05,
    singularity_floor: float = 1e-3,
    ik_tol: float = 1e-4,
    ik_iters: int = 60,
) -> tuple[JointConfig | None, str]:
    """Validated joint target for a mapped slave pose.

    Returns (config, "ok") or (None, reason); the caller keeps the previous
    config on rejection. Collision clearance needs both arms and is the
    engine's part of the check.
    """
    try:
        sol = inverse_kinematics(chain, x_s, current, tol=ik_tol, max_iters=ik_iters)
    except UnreachableTargetError:
        return None, "rejected: unreachable target"
    step = float(np.max(np.abs(sol.angles - current.angles)))
    if step > step_bound:
        return None, f"rejected: joint step {step:.3f} rad exceeds bound {step_bound:.3f}"
    if np.any(sol.angles < chain.lower_limits - 1e-12) or np.any(
        sol.angles > chain.upper_limits + 1e-12
    ):
        return None, "rejected: joint limits"
    if singularity_measure(jacobian(chain, sol)) < singularity_floor:
        return None, "rejected: singularity floor"
    return sol, "ok"


def write_trace(path: str | Path, commands: list[MasterCommand]):
    """Write commands one per line; floats use repr so replay is bit-identical."""
    lines = [TRACE_HEADER]
    for cmd in commands:
        p = cmd.pose.position
        q = cmd.pose.quaternion
        fields = [str(cmd.tick)]
        fields += [repr(float(v)) for v in (p[0], p[1], p[2], q[0], q[1], q[2], q[3])]
        fields.append(repr(float(cmd.gripper)))
        fields.append("1" if cmd.clutch else "0")
        lines.append(" ".join(fields))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path: str | Path) -> list[MasterCommand]:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise TraceFormatError(f"trace file not found: {path}")
    commands: list[MasterCommand] = []
    saw_header = False
    last_tick = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# dualtwist-trace v1"):
                saw_header = True
            continue
        if not saw_header:
            raise TraceFormatError(f"{path}:{lineno}: missing trace header", line_number=lineno)
        parts = line.split()
        if len(parts) != 10:
            raise TraceFormatError(
                f"{path}:{lineno}: expected 10 fields, got {len(parts)}", line_number=lineno
            )
        try:
            tick = int(parts[0])
            vals = [float(v) for v in parts[1:9]]
            clutch = bool(int(parts[9]))
        except ValueError as exc:
            raise TraceFormatError(f"{path}:{lineno}: {exc}", line_number=lineno)
        if last_tick is not None and tick <= last_tick:
            raise TraceFormatError(
                f"{path}:{lineno}: ticks must be strictly increasing", line_number=lineno
            )
        last_tick = tick
        commands.append(
            MasterCommand(
                tick=tick,
                pose=Pose(np.array(vals[0:3]), np.array(vals[3:7])),
                gripper=vals[7],
                clutch=clutch,
            )
        )
    return commands

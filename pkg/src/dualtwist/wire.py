"""Text-framed wire protocol between the service and operator consoles.

Every frame is one JSON object with a "type" and protocol version "v".
Kinds: snapshot (server -> client, every tick), command (client -> server,
master pose sample), control (client -> server), error (server -> client).
See docs/protocol.md for the field-by-field contract.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ProtocolError
from .kinematics import Pose
from .service import StateSnapshot
from .teleop import MasterCommand

PROTOCOL_VERSION = 1

CONTROL_ACTIONS = ("reset", "record")


def encode_snapshot(snapshot: StateSnapshot) -> str:
    return json.dumps(
        {
            "type": "snapshot",
            "v": PROTOCOL_VERSION,
            "tick": snapshot.tick,
            "phase": snapshot.phase,
            "arms": {
                "left": {
                    "angles": snapshot.left_angles,
                    "points": snapshot.left_points,
                    "gripper": snapshot.left_gripper,
                },
                "right": {
                    "angles": snapshot.right_angles,
                    "points": snapshot.right_points,
                    "gripper": snapshot.right_gripper,
                },
            },
            "object": {
                "p1": snapshot.object_p1,
                "p2": snapshot.object_p2,
                "axis": snapshot.object_axis,
                "end1_grasp": snapshot.end1_grasp,
                "end2_grasp": snapshot.end2_grasp,
            },
            "metrics": {
                "delta_deg": snapshot.delta_deg,
                "d_min": snapshot.d_min,
                "closest_pair": list(snapshot.closest_pair),
                "witness_left": snapshot.witness_left,
                "witness_right": snapshot.witness_right,
                "theta_t_deg": snapshot.theta_t_deg,
                "m_left": snapshot.m_left,
                "m_right": snapshot.m_right,
                "f_m": snapshot.f_m if np.isfinite(snapshot.f_m) else None,
            },
            "gates": {
                "d_thr": snapshot.d_thr,
                "delta_tor_deg": snapshot.delta_tor_deg,
                "theta_total_deg": snapshot.theta_total_deg,
            },
            "last_verdict": snapshot.last_verdict,
            "abort_reason": snapshot.abort_reason,
        },
        separators=(",", ":"),
    )


def encode_error(message: str) -> str:
    return json.dumps(
        {"type": "error", "v": PROTOCOL_VERSION, "message": message}, separators=(",", ":")
    )


def decode_message(text: str) -> dict:
    """Parse and validate one incoming frame; raises ProtocolError on any defect."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"frame is not valid JSON: {exc}")
    if not isinstance(msg, dict):
        raise ProtocolError("frame must be a JSON object")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {msg.get('v')!r}")
    kind = msg.get("type")
    if kind == "command":
        _validate_command(msg)
    elif kind == "control":
        if msg.get("action") not in CONTROL_ACTIONS:
            raise ProtocolError(f"unknown control action {msg.get('action')!r}")
    else:
        raise ProtocolError(f"unknown message type {kind!r}")
    return msg


def _validate_command(msg: dict):
    pos = msg.get("pos")
    quat = msg.get("quat")
    if not (isinstance(pos, list) and len(pos) == 3 and all(_is_num(v) for v in pos)):
        raise ProtocolError("command.pos must be [x, y, z]")
    if not (isinstance(quat, list) and len(quat) == 4 and all(_is_num(v) for v in quat)):
        raise ProtocolError("command.quat must be [w, x, y, z]")
    if abs(float(np.linalg.norm(np.array(quat, dtype=float))) - 1.0) > 1e-6:
        raise ProtocolError("command.quat must be unit norm")
    gripper = msg.get("gripper")
    if not _is_num(gripper) or not 0.0 <= float(gripper) <= 1.0:
        raise ProtocolError("command.gripper must be a number in [0, 1]")
    if not isinstance(msg.get("clutch"), bool):
        raise ProtocolError("command.clutch must be a boolean")


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def command_from_message(msg: dict, tick: int) -> MasterCommand:
    """Build a MasterCommand from a validated command frame, stamped at tick."""
    return MasterCommand(
        tick=tick,
        pose=Pose(np.array(msg["pos"], dtype=float), np.array(msg["quat"], dtype=float)),
        gripper=float(msg["gripper"]),
        clutch=bool(msg["clutch"]),
    )


def command_to_message(cmd: MasterCommand) -> str:
    return json.dumps(
        {
            "type": "command",
            "v": PROTOCOL_VERSION,
            "pos": [float(v) for v in cmd.pose.position],
            "quat": [float(v) for v in cmd.pose.quaternion],
            "gripper": float(cmd.gripper),
            "clutch": bool(cmd.clutch),
        },
        separators=(",", ":"),
    )

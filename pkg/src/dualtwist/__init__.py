"""Dual-arm coordinated object-twisting simulator.

One arm follows planned motion while the other is steered live or from a
recorded trace; the engine monitors self-collision distance, directional
manipulability along the twist axis, and weighted configuration variation.
"""

__version__ = "0.1.0"

from .kinematics import (  # noqa: F401
    Jacobian,
    Joint,
    JointConfig,
    KinematicChain,
    Pose,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
    joint_positions,
)

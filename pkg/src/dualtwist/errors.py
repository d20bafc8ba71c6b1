"""Exception hierarchy for the dualtwist package."""


class DualTwistError(Exception):
    """Base class for all package errors."""


class ConfigError(DualTwistError, ValueError):
    """Invalid chain/scenario configuration or mismatched vector lengths."""


class DegenerateGeometryError(DualTwistError, ValueError):
    """Geometric input too small to define a direction (zero-length segment or vector)."""


class UnreachableTargetError(DualTwistError):
    """IK failed to reach the target pose within the iteration budget.

    Carries the best residual seen and the corresponding joint vector so the
    caller can diagnose or fall back.
    """

    def __init__(self, message, residual=None, best_angles=None):
        super().__init__(message)
        self.residual = residual
        self.best_angles = best_angles


class SingularConfigError(DualTwistError, ValueError):
    """A configuration was scored that must instead be rejected (non-positive manipulability)."""


class InfeasibleError(DualTwistError):
    """No candidate configuration satisfied all optimization constraints."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or []


class OverstretchError(DualTwistError):
    """Both object ends grasped but pulled farther apart than the object length."""


class GraspStateError(DualTwistError, ValueError):
    """Operation requires a different grasp state (e.g. pendent angle needs exactly one end held)."""


class PhaseError(DualTwistError):
    """Command not valid in the current task phase."""


class TraceFormatError(DualTwistError, ValueError):
    """Malformed teleoperation trace file."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class ProtocolError(DualTwistError, ValueError):
    """Malformed or unsupported wire-protocol message."""

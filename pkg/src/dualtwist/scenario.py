"""Loaders for the YAML chain descriptions and scenario files.

Paths inside a scenario are resolved relative to the scenario file, so a
scenario can travel with its chain configs and trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .kinematics import Joint, JointConfig, KinematicChain
from .transforms import rpy_matrix

DATA_DIR = Path(__file__).parent / "data"


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing '{key}' in {where}")
    return mapping[key]


def _vec3(value, where: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ConfigError(f"{where} must be a 3-vector, got {value!r}")
    return arr


def load_chain(path: str | Path) -> KinematicChain:
    """Load one arm's kinematic chain from a YAML description."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"chain file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"chain file {path} is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"chain file {path} must contain a mapping")

    base = raw.get("base", {})
    base_p = _vec3(base.get("xyz", [0.0, 0.0, 0.0]), f"{path}: base.xyz")
    rpy = base.get("rpy", [0.0, 0.0, 0.0])
    base_R = rpy_matrix(*[float(v) for v in rpy])

    joints = []
    for i, spec in enumerate(_require(raw, "joints", str(path))):
        where = f"{path}: joints[{i}]"
        axis = _vec3(_require(spec, "axis", where), f"{where}.axis")
        to_next = _require(spec, "to_next", where)
        xyz = _vec3(to_next.get("xyz", [0.0, 0.0, 0.0]), f"{where}.to_next.xyz")
        r, p_, y_ = [float(v) for v in to_next.get("rpy", [0.0, 0.0, 0.0])]
        limits = _require(spec, "limits", where)
        if len(limits) != 2:
            raise ConfigError(f"{where}.limits must be [lower, upper]")
        joints.append(
            Joint(
                axis=axis,
                to_next_rotation=rpy_matrix(r, p_, y_),
                to_next_translation=xyz,
                lower=float(limits[0]),
                upper=float(limits[1]),
            )
        )
    return KinematicChain(
        joints=tuple(joints),
        base_rotation=base_R,
        base_position=base_p,
        name=str(raw.get("name", path.stem)),
    )


@dataclass
class ObjectParams:
    length: float
    stiffness: float
    p1: np.ndarray
    axis: np.ndarray
    misgrasp_offset_deg: float = 0.0


@dataclass
class TaskParams:
    prepare_position: np.ndarray  # P_S: where the grasped end is held for alignment
    alignment_tolerance_deg: float = 5.0
    collision_threshold: float | None = None  # None -> object length
    grasp_tolerance_pos: float = 0.005
    grasp_tolerance_deg: float = 10.0
    arrive_tolerance: float = 0.003
    linear_speed: float = 0.004  # m per tick along planned paths
    angular_speed_deg: float = 2.0  # deg per tick along planned paths
    auto_grasp: bool = True
    auto_lift: bool = True


@dataclass
class TwistParams:
    right_target_deg: float = -45.0
    left_target_deg: float = 45.0
    total_deg: float = 90.0
    rate_deg_per_tick: float = 1.0
    left_source: str = "plan"  # plan | teleop

    def __post_init__(self):
        if abs(self.left_target_deg - self.right_target_deg) < self.total_deg - 1e-12:
            raise ConfigError(
                "twist targets span less than the completion threshold: "
                f"|{self.left_target_deg} - {self.right_target_deg}| < {self.total_deg}"
            )
        if self.left_source not in ("plan", "teleop"):
            raise ConfigError(f"twist.left_source must be 'plan' or 'teleop', got {self.left_source!r}")


@dataclass
class TeleopParams:
    source: str = "trace"  # live | trace
    trace: Path | None = None
    scale: float = 1.0
    step_bound: float = 0.05  # rad per accepted command
    singularity_floor: float = 1e-3
    offset_xyz: np.ndarray = field(default_factory=lambda: np.zeros(3))
    offset_rpy: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass
class ServiceParams:
    tick_rate: float = 50.0
    max_ticks: int = 5000
    interactive_tick_rate: float = 20.0


@dataclass
class OptimizationParams:
    lambda_m: float = 1.0
    singularity_floor: float = 1e-3
    seed_count: int = 8
    redundant_joint: int = 2
    beta_left: float = 1.0
    beta_right: float = 1.0


@dataclass
class Scenario:
    name: str
    left_arm_path: Path
    right_arm_path: Path
    left_initial: np.ndarray
    right_initial: np.ndarray
    obj: ObjectParams
    task: TaskParams
    twist: TwistParams
    teleop: TeleopParams
    service: ServiceParams
    optimization: OptimizationParams
    skip_gripper_segments: bool = True

    @property
    def collision_threshold(self) -> float:
        if self.task.collision_threshold is not None:
            return self.task.collision_threshold
        return self.obj.length

    def load_chains(self) -> tuple[KinematicChain, KinematicChain]:
        return load_chain(self.left_arm_path), load_chain(self.right_arm_path)

    def initial_configs(self) -> tuple[JointConfig, JointConfig]:
        return JointConfig(self.left_initial.copy()), JointConfig(self.right_initial.copy())


def _resolve(base_dir: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else (base_dir / p).resolve()


def load_scenario(
    path: str | Path,
    left_arm: str | Path | None = None,
    right_arm: str | Path | None = None,
) -> Scenario:
    """Load a scenario file; optional arguments override the arm config paths."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"scenario file {path} is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"scenario file {path} must contain a mapping")
    base_dir = path.parent

    arms = _require(raw, "arms", str(path))
    left_path = Path(left_arm) if left_arm else _resolve(base_dir, _require(arms, "left", "arms"))
    right_path = Path(right_arm) if right_arm else _resolve(base_dir, _require(arms, "right", "arms"))
    left_initial = np.asarray(_require(arms, "left_initial", "arms"), dtype=float)
    right_initial = np.asarray(_require(arms, "right_initial", "arms"), dtype=float)

    o = _require(raw, "object", str(path))
    obj = ObjectParams(
        length=float(_require(o, "length", "object")),
        stiffness=float(_require(o, "stiffness", "object")),
        p1=_vec3(_require(o, "p1", "object"), "object.p1"),
        axis=_vec3(_require(o, "axis", "object"), "object.axis"),
        misgrasp_offset_deg=float(o.get("misgrasp_offset_deg", 0.0)),
    )
    if not 0.0 <= obj.stiffness <= 1.0:
        raise ConfigError(f"object.stiffness must be in [0, 1], got {obj.stiffness}")
    if obj.length <= 0.0:
        raise ConfigError("object.length must be positive")

    t = _require(raw, "task", str(path))
    task = TaskParams(
        prepare_position=_vec3(_require(t, "prepare_position", "task"), "task.prepare_position"),
        alignment_tolerance_deg=float(t.get("alignment_tolerance_deg", 5.0)),
        collision_threshold=(
            float(t["collision_threshold"]) if t.get("collision_threshold") is not None else None
        ),
        grasp_tolerance_pos=float(t.get("grasp_tolerance_pos", 0.005)),
        grasp_tolerance_deg=float(t.get("grasp_tolerance_deg", 10.0)),
        arrive_tolerance=float(t.get("arrive_tolerance", 0.003)),
        linear_speed=float(t.get("linear_speed", 0.004)),
        angular_speed_deg=float(t.get("angular_speed_deg", 2.0)),
        auto_grasp=bool(t.get("auto_grasp", True)),
        auto_lift=bool(t.get("auto_lift", True)),
    )

    tw = raw.get("twist", {})
    twist = TwistParams(
        right_target_deg=float(tw.get("right_target_deg", -45.0)),
        left_target_deg=float(tw.get("left_target_deg", 45.0)),
        total_deg=float(tw.get("total_deg", 90.0)),
        rate_deg_per_tick=float(tw.get("rate_deg_per_tick", 1.0)),
        left_source=str(tw.get("left_source", "plan")),
    )

    tp = raw.get("teleop", {})
    source = str(tp.get("source", "trace"))
    if source not in ("live", "trace"):
        raise ConfigError(f"teleop.source must be 'live' or 'trace', got {source!r}")
    trace = tp.get("trace")
    teleop = TeleopParams(
        source=source,
        trace=_resolve(base_dir, trace) if trace else None,
        scale=float(tp.get("scale", 1.0)),
        step_bound=float(tp.get("step_bound", 0.05)),
        singularity_floor=float(tp.get("singularity_floor", 1e-3)),
        offset_xyz=_vec3(tp.get("offset_xyz", [0, 0, 0]), "teleop.offset_xyz"),
        offset_rpy=_vec3(tp.get("offset_rpy", [0, 0, 0]), "teleop.offset_rpy"),
    )
    if teleop.scale <= 0.0:
        raise ConfigError("teleop.scale must be positive")

    sv = raw.get("service", {})
    service = ServiceParams(
        tick_rate=float(sv.get("tick_rate", 50.0)),
        max_ticks=int(sv.get("max_ticks", 5000)),
        interactive_tick_rate=float(sv.get("interactive_tick_rate", 20.0)),
    )
    if service.tick_rate <= 0.0 or service.interactive_tick_rate <= 0.0:
        raise ConfigError("tick rates must be positive")

    op = raw.get("optimization", {})
    optimization = OptimizationParams(
        lambda_m=float(op.get("lambda_m", 1.0)),
        singularity_floor=float(op.get("singularity_floor", 1e-3)),
        seed_count=int(op.get("seed_count", 8)),
        redundant_joint=int(op.get("redundant_joint", 2)),
        beta_left=float(op.get("beta_left", 1.0)),
        beta_right=float(op.get("beta_right", 1.0)),
    )

    return Scenario(
        name=str(raw.get("name", path.stem)),
        left_arm_path=left_path,
        right_arm_path=right_path,
        left_initial=left_initial,
        right_initial=right_initial,
        obj=obj,
        task=task,
        twist=twist,
        teleop=teleop,
        service=service,
        optimization=optimization,
        skip_gripper_segments=bool(raw.get("skip_gripper_segments", True)),
    )


def default_scenario_path() -> Path:
    return DATA_DIR / "reference_scenario.yaml"


def default_chain_paths() -> tuple[Path, Path]:
    return DATA_DIR / "chains" / "left_arm.yaml", DATA_DIR / "chains" / "right_arm.yaml"

"""Grasp/twist configuration selection.

Minimizes weighted joint variation plus (optionally) the manipulability
fitness, subject to joint limits, a singularity floor on the Yoshikawa
measure, and the inter-arm distance threshold. The redundancy of a 7-DOF
arm is explored with multi-seed IK followed by coordinate-descent
refinement in the self-motion manifold; the weighted |dq| objective is
non-smooth, so the search is derivative-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .collision import ArmSkeleton, min_arm_distance
from .errors import ConfigError, InfeasibleError, UnreachableTargetError
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
from .manipulability import directional_manipulability, singularity_measure

DEFAULT_ALPHA = (1.0, 0.5, 0.5, 0.1, 0.1, 0.1, 0.1)
DEDUP_TOL = 1e-3
REFINE_STEPS = (0.2, 0.08)
REFINE_SWEEPS = 2
REFINE_TOP_K = 3


@dataclass(frozen=True)
class VariationWeights:
    """Per-joint weights for configuration variation; heavier near the base."""

    alpha: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_ALPHA))

    def __post_init__(self):
        arr = np.asarray(self.alpha, dtype=float)
        if np.any(arr <= 0.0):
            raise ConfigError("variation weights must be positive")
        object.__setattr__(self, "alpha", arr)


@dataclass
class OptimizationProblem:
    left_chain: KinematicChain
    right_chain: KinematicChain
    left_initial: JointConfig
    right_initial: JointConfig
    left_target: Pose
    right_target: Pose
    alpha_left: VariationWeights = field(default_factory=VariationWeights)
    alpha_right: VariationWeights = field(default_factory=VariationWeights)
    beta_left: float = 1.0
    beta_right: float = 1.0
    lambda_m: float = 1.0
    eps_singular: float = 1e-3
    d_thr: float = 0.1
    ik_tol: float = 1e-4
    ik_iters: int = 150
    seed_count: int = 8
    redundant_joint: int = 2
    skip_gripper_segments: bool = True

    def __post_init__(self):
        if self.lambda_m < 0.0:
            raise ConfigError("lambda_m must be non-negative")
        if self.eps_singular <= 0.0:
            raise ConfigError("eps_singular must be positive")


@dataclass
class OptimizationResult:
    left_config: JointConfig
    right_config: JointConfig
    f_a: float
    f_m: float
    combined: float  # f_a + lambda_m * f_m
    sigma_left: float
    sigma_right: float
    d_min: float
    iterations: int
    converged: bool
    audit_left: list[float]
    audit_right: list[float]


def variation_cost(initial: JointConfig, final: JointConfig, weights: VariationWeights) -> float:
    """Weighted absolute joint change for one arm: sum_i alpha_i |dq_i|."""
    a = np.asarray(initial.angles, dtype=float)
    b = np.asarray(final.angles, dtype=float)
    if a.shape != b.shape or a.shape != weights.alpha.shape:
        raise ConfigError(
            f"mismatched lengths: initial {a.shape}, final {b.shape}, alpha {weights.alpha.shape}"
        )
    return float(np.sum(weights.alpha * np.abs(b - a)))


def null_space_candidates(
    chain: KinematicChain,
    target: Pose,
    seeds: list[JointConfig],
    tol: float = 1e-4,
    max_iters: int = 150,
) -> list[JointConfig]:
    """Deduplicated IK solutions for the same target from several seeds.

    Seeds that fail to converge are dropped; an empty list means no seed
    reached the target.
    """
    found: list[JointConfig] = []
    for seed in seeds:
        try:
            sol = inverse_kinematics(chain, target, seed, tol=tol, max_iters=max_iters)
        except UnreachableTargetError:
            continue
        if pose_error(forward_kinematics(chain, sol), target) > tol:
            continue
        if any(np.max(np.abs(sol.angles - f.angles)) < DEDUP_TOL for f in found):
            continue
        found.append(sol)
    return found


class _ArmSearch:
    """Single-arm candidate generation and refinement (the d_thr coupling is handled later)."""

    def __init__(self, chain, initial, target, alpha, beta, problem):
        self.chain = chain
        self.initial = initial
        self.target = target
        self.alpha = alpha
        self.beta = beta
        self.p = problem
        self.k = target.rotation[:, 2]  # twist axis at the target pose
        self.ik_calls = 0

    def _solve(self, seed):
        self.ik_calls += 1
        return inverse_kinematics(
            self.chain, self.target, seed, tol=self.p.ik_tol, max_iters=self.p.ik_iters
        )

    def manipulability(self, q: JointConfig) -> float:
        return directional_manipulability(jacobian(self.chain, q).angular, self.k)

    def objective(self, q: JointConfig) -> float:
        cost = variation_cost(self.initial, q, self.alpha)
        if self.p.lambda_m > 0.0:
            m = self.manipulability(q)
            if m <= 0.0:
                return np.inf
            cost += self.p.lambda_m * self.beta / m
        return cost

    def feasible(self, q: JointConfig) -> list[str]:
        issues = []
        angles = q.angles
        if np.any(angles < self.chain.lower_limits - 1e-9) or np.any(
            angles > self.chain.upper_limits + 1e-9
        ):
            issues.append(f"{self.chain.name}: joint limits violated")
        if singularity_measure(jacobian(self.chain, q)) < self.p.eps_singular:
            issues.append(f"{self.chain.name}: singularity measure below floor")
        if pose_error(forward_kinematics(self.chain, q), self.target) > self.p.ik_tol:
            issues.append(f"{self.chain.name}: target pose not reached")
        return issues

    def seeds(self) -> list[JointConfig]:
        out = [self.initial]
        j = self.p.redundant_joint
        lo = self.chain.lower_limits[j] * 0.9
        hi = self.chain.upper_limits[j] * 0.9
        for value in np.linspace(lo, hi, self.p.seed_count):
            angles = self.initial.angles.copy()
            angles[j] = value
            out.append(JointConfig(angles))
        return out

    def refine(self, q: JointConfig) -> tuple[JointConfig, list[float]]:
        audit = [self.objective(q)]
        for step in REFINE_STEPS:
            for _ in range(REFINE_SWEEPS):
                improved = False
                for j in range(self.chain.joint_count):
                    for sign in (1.0, -1.0):
                        seed = q.angles.copy()
                        seed[j] = float(
                            np.clip(
                                seed[j] + sign * step,
                                self.chain.lower_limits[j],
                                self.chain.upper_limits[j],
                            )
                        )
                        try:
                            trial = self._solve(JointConfig(seed))
                        except UnreachableTargetError:
                            continue
                        if self.feasible(trial):
                            continue
                        value = self.objective(trial)
                        if value < audit[-1] - 1e-12:
                            q = trial
                            audit.append(value)
                            improved = True
                if not improved:
                    break
        return q, audit

    def candidates(self):
        """Refined feasible candidates sorted by objective (baseline seed first on ties)."""
        sols = null_space_candidates(
            self.chain, self.target, self.seeds(), tol=self.p.ik_tol, max_iters=self.p.ik_iters
        )
        self.ik_calls += len(self.seeds())
        scored = []
        for sol in sols:
            if self.feasible(sol):
                continue
            scored.append((self.objective(sol), sol))
        scored.sort(key=lambda item: item[0])
        refined = []
        for value, sol in scored[:REFINE_TOP_K]:
            best, audit = self.refine(sol)
            refined.append((audit[-1], best, audit))
        for value, sol in scored[REFINE_TOP_K:]:
            refined.append((value, sol, [value]))
        refined.sort(key=lambda item: item[0])
        return refined


def _pair_distance(problem: OptimizationProblem, left: JointConfig, right: JointConfig) -> float:
    left_skel = ArmSkeleton(joint_positions(problem.left_chain, left))
    right_skel = ArmSkeleton(joint_positions(problem.right_chain, right))
    return min_arm_distance(
        left_skel, right_skel, skip_adjacent_to_grasp=problem.skip_gripper_segments
    ).d_min


def optimize_twist_configs(problem: OptimizationProblem) -> OptimizationResult:
    """Pick dual-arm configurations for the twist targets.

    Candidate pairs are scanned in order of combined objective
    f_a + lambda_m * f_m; the first pair clearing the distance threshold
    wins, so whenever the plain-IK pair is feasible the returned objective
    never exceeds it.
    """
    left = _ArmSearch(
        problem.left_chain,
        problem.left_initial,
        problem.left_target,
        problem.alpha_left,
        problem.beta_left,
        problem,
    )
    right = _ArmSearch(
        problem.right_chain,
        problem.right_initial,
        problem.right_target,
        problem.alpha_right,
        problem.beta_right,
        problem,
    )
    left_cands = left.candidates()
    right_cands = right.candidates()
    if not left_cands or not right_cands:
        raise InfeasibleError(
            "no feasible single-arm candidates",
            violations=[
                f"{arm.chain.name}: no IK solution satisfied limits/singularity floor"
                for arm, cands in ((left, left_cands), (right, right_cands))
                if not cands
            ],
        )

    pairs = sorted(
        (
            (lv + rv, li, ri)
            for li, (lv, _, _) in enumerate(left_cands)
            for ri, (rv, _, _) in enumerate(right_cands)
        ),
        key=lambda item: item[0],
    )
    best_pair = None
    for _, li, ri in pairs:
        lv, lq, laudit = left_cands[li]
        rv, rq, raudit = right_cands[ri]
        d = _pair_distance(problem, lq, rq)
        if best_pair is None:
            best_pair = (lq, rq, d)
        if d >= problem.d_thr:
            f_a = variation_cost(problem.left_initial, lq, problem.alpha_left) + variation_cost(
                problem.right_initial, rq, problem.alpha_right
            )
            m_l = left.manipulability(lq)
            m_r = right.manipulability(rq)
            f_m = problem.beta_left / m_l + problem.beta_right / m_r
            return OptimizationResult(
                left_config=lq,
                right_config=rq,
                f_a=f_a,
                f_m=f_m,
                combined=f_a + problem.lambda_m * f_m,
                sigma_left=singularity_measure(jacobian(problem.left_chain, lq)),
                sigma_right=singularity_measure(jacobian(problem.right_chain, rq)),
                d_min=d,
                iterations=left.ik_calls + right.ik_calls,
                converged=True,
                audit_left=laudit,
                audit_right=raudit,
            )

    lq, rq, d = best_pair
    violations = left.feasible(lq) + right.feasible(rq)
    violations.append(f"inter-arm distance {d:.4f} m below threshold {problem.d_thr:.4f} m")
    raise InfeasibleError("no candidate pair satisfied all constraints", violations=violations)

"""Collision-module tests against sampling oracles.

The grid/sampling oracles were written first and the expected behaviors
frozen from them; they never call the production distance routines.
"""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from dualtwist.collision import (
    ArmSkeleton,
    CollisionVerdict,
    DistanceReport,
    Segment,
    collision_check,
    line_line_distance,
    min_arm_distance,
    point_segment_distance,
    segment_segment_distance,
)
from dualtwist.errors import ConfigError, DegenerateGeometryError


def grid_oracle(a: Segment, b: Segment, n: int = 500) -> float:
    """Brute-force min distance over an n x n grid of points on both segments."""
    s = np.linspace(0.0, 1.0, n)
    A = a.start[None, :] + s[:, None] * a.direction[None, :]
    B = b.start[None, :] + s[:, None] * b.direction[None, :]
    d2 = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * (A @ B.T)
    return float(np.sqrt(max(float(d2.min()), 0.0)))


def lattice_min_line_distance(a: Segment, b: Segment, lo=-2.0, hi=3.0, n=10_000) -> float:
    """Min distance between two dense point lattices on the carrier lines.

    For each sample on line b the squared distance is convex in the line-a
    parameter, so the lattice minimum over that row sits at the lattice
    neighbors of the continuous row minimizer; evaluating those suffices.
    """
    tb = np.linspace(lo, hi, n)
    B = b.start[None, :] + tb[:, None] * b.direction[None, :]
    na = a.direction
    denom = float(np.dot(na, na))
    s_star = (B - a.start[None, :]) @ na / denom
    step = (hi - lo) / (n - 1)
    idx = np.clip(np.round((s_star - lo) / step), 0, n - 1)
    best = np.inf
    for offset in (-1.0, 0.0, 1.0):
        sa = lo + np.clip(idx + offset, 0, n - 1) * step
        A = a.start[None, :] + sa[:, None] * na[None, :]
        d2 = ((A - B) ** 2).sum(1)
        best = min(best, float(d2.min()))
    return float(np.sqrt(max(best, 0.0)))


def point_sampling_oracle(point: np.ndarray, s: Segment, n: int = 100_000) -> float:
    t = np.linspace(0.0, 1.0, n)
    P = s.start[None, :] + t[:, None] * s.direction[None, :]
    return float(np.sqrt(((P - point[None, :]) ** 2).sum(1).min()))


def random_segment(rng, max_len=0.45):
    start = rng.uniform(0.0, 1.0, size=3)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    return Segment(start, start + rng.uniform(0.05, max_len) * direction)


class TestLineLineDistance:
    def test_perpendicular_skew_lines(self):
        a = Segment(np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        b = Segment(np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 1.0]))
        res = line_line_distance(a, b)
        assert not res.parallel
        assert res.distance == pytest.approx(1.0, abs=1e-12)
        assert res.c_a == pytest.approx(0.0, abs=1e-12)
        assert res.c_b == pytest.approx(0.0, abs=1e-12)

    def test_identical_lines_take_parallel_branch(self):
        a = Segment(np.array([0.0, 0.0, 0.0]), np.array([1.0, 1.0, 0.0]))
        b = Segment(np.array([0.0, 0.0, 0.0]), np.array([2.0, 2.0, 0.0]))
        res = line_line_distance(a, b)
        assert res.parallel
        assert res.distance == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_raises(self):
        a = Segment(np.zeros(3), np.zeros(3))
        b = Segment(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        with pytest.raises(DegenerateGeometryError):
            line_line_distance(a, b)

    def test_lower_bounds_dense_lattice(self):
        rng = np.random.default_rng(31)
        for k in range(1000):
            a, b = random_segment(rng), random_segment(rng)
            res = line_line_distance(a, b)
            n = 10_000 if k < 5 else 400
            lattice = lattice_min_line_distance(a, b, n=n)
            assert res.distance <= lattice + 1e-9

    def test_closest_point_parameters_are_stationary(self):
        rng = np.random.default_rng(32)
        for _ in range(200):
            a, b = random_segment(rng), random_segment(rng)
            res = line_line_distance(a, b)
            if res.parallel:
                continue
            pa = a.point_at(res.c_a)
            pb = b.point_at(res.c_b)
            gap = pa - pb
            assert np.linalg.norm(gap) == pytest.approx(res.distance, abs=1e-9)
            # common normal is orthogonal to both lines
            assert abs(np.dot(gap, a.direction)) < 1e-9 * a.length
            assert abs(np.dot(gap, b.direction)) < 1e-9 * b.length


class TestPointSegmentDistance:
    def test_interior_foot(self):
        s = Segment(np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        res = point_segment_distance(np.array([0.5, 1.0, 0.0]), s)
        assert res.distance == pytest.approx(1.0, abs=1e-12)
        assert res.b == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(res.witness, [0.5, 0.0, 0.0], atol=1e-12)

    def test_foot_outside_uses_endpoint(self):
        s = Segment(np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        res = point_segment_distance(np.array([2.0, 0.0, 0.0]), s)
        assert res.distance == pytest.approx(1.0, abs=1e-12)
        assert res.b > 1.0
        np.testing.assert_allclose(res.witness, [1.0, 0.0, 0.0], atol=1e-12)

    def test_matches_sampling_oracle(self):
        rng = np.random.default_rng(33)
        for _ in range(50):
            s = random_segment(rng)
            c = rng.uniform(-0.5, 1.5, size=3)
            res = point_segment_distance(c, s)
            assert res.distance == pytest.approx(point_sampling_oracle(c, s), abs=1e-4)


class TestSegmentSegmentDistance:
    def test_parallel_unit_offset(self):
        a = Segment(np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        b = Segment(np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 1.0]))
        res = segment_segment_distance(a, b)
        assert res.distance == pytest.approx(1.0, abs=1e-12)

    def test_intersecting_segments(self):
        a = Segment(np.array([-1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        b = Segment(np.array([0.0, -1.0, 0.0]), np.array([0.0, 1.0, 0.0]))
        res = segment_segment_distance(a, b)
        assert res.distance == pytest.approx(0.0, abs=1e-12)

    def test_witnesses_lie_on_segments(self):
        rng = np.random.default_rng(34)
        for _ in range(300):
            a, b = random_segment(rng), random_segment(rng)
            res = segment_segment_distance(a, b)
            assert np.linalg.norm(res.witness_a - res.witness_b) == pytest.approx(
                res.distance, abs=1e-9
            )
            for w, s in ((res.witness_a, a), (res.witness_b, b)):
                t = float(np.dot(w - s.start, s.direction) / np.dot(s.direction, s.direction))
                assert -1e-9 <= t <= 1.0 + 1e-9
                np.testing.assert_allclose(w, s.point_at(np.clip(t, 0, 1)), atol=1e-9)

    def test_symmetry(self):
        rng = np.random.default_rng(35)
        for _ in range(200):
            a, b = random_segment(rng), random_segment(rng)
            ab = segment_segment_distance(a, b).distance
            ba = segment_segment_distance(b, a).distance
            assert abs(ab - ba) <= 1e-12

    def test_endpoint_distance_upper_bound(self):
        rng = np.random.default_rng(36)
        for _ in range(200):
            a, b = random_segment(rng), random_segment(rng)
            d = segment_segment_distance(a, b).distance
            bound = min(
                point_segment_distance(a.start, b).distance,
                point_segment_distance(a.end, b).distance,
                point_segment_distance(b.start, a).distance,
                point_segment_distance(b.end, a).distance,
            )
            assert d <= bound + 1e-12

    def test_rigid_transform_invariance(self):
        rng = np.random.default_rng(37)
        for _ in range(100):
            a, b = random_segment(rng), random_segment(rng)
            d0 = segment_segment_distance(a, b).distance
            R = Rotation.random(random_state=rng).as_matrix()
            t = rng.uniform(-2, 2, size=3)
            a2 = Segment(R @ a.start + t, R @ a.end + t)
            b2 = Segment(R @ b.start + t, R @ b.end + t)
            assert abs(segment_segment_distance(a2, b2).distance - d0) <= 1e-9

    def test_degenerate_segments_fall_back_to_points(self):
        p = Segment(np.array([0.0, 0.0, 2.0]) , np.array([0.0, 0.0, 2.0]))
        s = Segment(np.array([-1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        res = segment_segment_distance(p, s)
        assert res.distance == pytest.approx(2.0, abs=1e-12)
        both = segment_segment_distance(p, Segment(np.zeros(3), np.zeros(3)))
        assert both.distance == pytest.approx(2.0, abs=1e-12)

    def test_matches_grid_oracle(self):
        rng = np.random.default_rng(38)
        for _ in range(200):
            a, b = random_segment(rng), random_segment(rng)
            d = segment_segment_distance(a, b).distance
            assert abs(d - grid_oracle(a, b, n=500)) <= 1e-3


class TestMinArmDistance:
    def _straight_skeleton(self, x):
        pts = np.zeros((8, 3))
        pts[:, 2] = np.arange(8) * 0.1
        pts[:, 0] = x
        return ArmSkeleton(pts)

    def test_mirrored_skeletons(self):
        left = self._straight_skeleton(0.5)
        right = self._straight_skeleton(-0.5)
        report = min_arm_distance(left, right)
        assert report.d_min == pytest.approx(1.0, abs=1e-12)

    def test_identical_skeletons(self):
        left = self._straight_skeleton(0.0)
        report = min_arm_distance(left, left)
        assert report.d_min == pytest.approx(0.0, abs=1e-12)

    def test_matches_exhaustive_loop(self):
        rng = np.random.default_rng(39)
        for _ in range(30):
            left = ArmSkeleton(rng.uniform(-0.5, 0.5, size=(8, 3)))
            right = ArmSkeleton(rng.uniform(-0.5, 0.5, size=(8, 3)))
            report = min_arm_distance(left, right)
            best = None
            for i, sl in enumerate(left.segments):
                for j, sr in enumerate(right.segments):
                    d = segment_segment_distance(sl, sr).distance
                    if best is None or d < best[0]:
                        best = (d, (i, j))
            assert report.d_min == pytest.approx(best[0], abs=1e-9)
            assert report.closest_pair == best[1]

    def test_skip_gripper_segments(self):
        # terminal segments touch; everything else stays 1 m apart
        left_pts = np.zeros((4, 3))
        left_pts[:, 0] = 0.5
        left_pts[:, 2] = [0.0, 0.3, 0.6, 0.9]
        left_pts[3] = [0.0, 0.0, 0.9]
        right_pts = np.zeros((4, 3))
        right_pts[:, 0] = -0.5
        right_pts[:, 2] = [0.0, 0.3, 0.6, 0.9]
        right_pts[3] = [0.0, 0.0, 0.9]
        left, right = ArmSkeleton(left_pts), ArmSkeleton(right_pts)
        touching = min_arm_distance(left, right)
        assert touching.d_min == pytest.approx(0.0, abs=1e-12)
        skipped = min_arm_distance(left, right, skip_adjacent_to_grasp=True)
        assert skipped.d_min == pytest.approx(1.0, abs=1e-12)

    def test_report_invariants(self):
        rng = np.random.default_rng(40)
        left = ArmSkeleton(rng.uniform(-0.5, 0.5, size=(8, 3)))
        right = ArmSkeleton(rng.uniform(-0.5, 0.5, size=(8, 3)))
        report = min_arm_distance(left, right)
        assert report.d_min >= 0.0
        assert np.linalg.norm(report.witness_left - report.witness_right) == pytest.approx(
            report.d_min, abs=1e-9
        )


class TestCollisionCheck:
    def _report(self, d):
        return DistanceReport(d, (0, 0), np.zeros(3), np.array([d, 0.0, 0.0]))

    def test_safe(self):
        verdict = collision_check(self._report(0.30), 0.25)
        assert verdict.safe

    def test_boundary_inclusive(self):
        verdict = collision_check(self._report(0.25), 0.25)
        assert verdict.safe

    def test_unsafe_carries_report(self):
        report = self._report(0.10)
        verdict = collision_check(report, 0.25)
        assert not verdict.safe
        assert verdict.report is report

    def test_invalid_threshold(self):
        with pytest.raises(ConfigError):
            collision_check(self._report(0.1), 0.0)

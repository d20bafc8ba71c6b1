import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from dualtwist.errors import DegenerateGeometryError, GraspStateError, OverstretchError
from dualtwist.kinematics import Pose
from dualtwist.object_model import (
    AlignmentVariant,
    GraspedBy,
    TwistObject,
    alignment_error,
    angle_between,
    droop_direction,
    pendent_angle,
    update_object,
)
from dualtwist.transforms import frame_from_z, quat_from_matrix


def pose_with_z(position, z_axis):
    return Pose(np.asarray(position, float), quat_from_matrix(frame_from_z(z_axis)))


def bar(s=0.5, p1=(0, 0, 0), p2=(0.1, 0, 0), **kw):
    return TwistObject(length=0.1, stiffness=s, p1=np.array(p1, float), p2=np.array(p2, float), **kw)


class TestAngleBetween:
    def test_equal_vectors(self):
        assert angle_between(np.array([1.0, 2, 3]), np.array([1.0, 2, 3])) == pytest.approx(0.0)

    def test_perpendicular(self):
        assert angle_between(np.array([1.0, 0, 0]), np.array([0, 1.0, 0])) == pytest.approx(90.0)

    def test_45_degrees(self):
        assert angle_between(np.array([1.0, 1.0, 0]), np.array([1.0, 0, 0])) == pytest.approx(45.0)

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(51)
        for _ in range(200):
            u, v = rng.normal(size=3), rng.normal(size=3)
            a = angle_between(u, v)
            assert a == pytest.approx(angle_between(v, u), abs=1e-12)
            assert 0.0 <= a <= 180.0

    def test_rigid_invariance(self):
        rng = np.random.default_rng(52)
        for _ in range(100):
            u, v = rng.normal(size=3), rng.normal(size=3)
            R = Rotation.random(random_state=rng).as_matrix()
            assert angle_between(R @ u, R @ v) == pytest.approx(angle_between(u, v), abs=1e-9)

    def test_zero_vector_raises(self):
        with pytest.raises(DegenerateGeometryError):
            angle_between(np.zeros(3), np.array([1.0, 0, 0]))


class TestAlignmentError:
    def test_axis_to_axis_zero_when_axes_match(self):
        right = pose_with_z([0.0, 0, 0], [0, 1.0, 0])
        left = pose_with_z([0.1, 0, 0], [0, 1.0, 0])
        err = alignment_error(right, left, bar(s=0.2), AlignmentVariant.AXIS_TO_AXIS)
        assert err.delta_deg == pytest.approx(0.0, abs=1e-9)

    def test_axis_to_object_zero(self):
        right = pose_with_z([0.0, 0, 0], [1.0, 0, 0])
        left = pose_with_z([0.2, 0, 0], [0, 0, 1.0])
        err = alignment_error(right, left, bar(), AlignmentVariant.AXIS_TO_OBJECT)
        assert err.delta_deg == pytest.approx(0.0, abs=1e-9)

    def test_grip_line_constructed_30_degrees(self):
        obj = bar(p1=(0, 0, 0), p2=(0.1, 0, 0))
        c, s = math.cos(math.radians(30)), math.sin(math.radians(30))
        left = pose_with_z([0.0, 0.0, 0.0], [0, 0, 1.0])
        right = pose_with_z([0.1 * c, 0.1 * s, 0.0], [0, 0, 1.0])
        err = alignment_error(right, left, obj, AlignmentVariant.GRIP_LINE_TO_OBJECT)
        assert err.delta_deg == pytest.approx(30.0, abs=1e-9)

    def test_variant_auto_selection_by_stiffness(self):
        right = pose_with_z([0.0, 0, 0], [0, 1.0, 0])
        left = pose_with_z([0.1, 0, 0], [0, 1.0, 0])
        assert (
            alignment_error(right, left, bar(s=0.9)).variant
            is AlignmentVariant.GRIP_LINE_TO_OBJECT
        )
        assert alignment_error(right, left, bar(s=0.3)).variant is AlignmentVariant.AXIS_TO_AXIS


class TestPendentAngle:
    def _held_bar(self, s):
        return bar(s=s, end1_grasp=GraspedBy.RIGHT)

    def test_rigid_no_droop(self):
        holder = pose_with_z([0, 0, 0.4], [1.0, 0, 0])
        assert pendent_angle(self._held_bar(1.0), holder) == pytest.approx(0.0)

    def test_soft_horizontal_hangs_vertical(self):
        holder = pose_with_z([0, 0, 0.4], [1.0, 0, 0])
        assert pendent_angle(self._held_bar(0.0), holder) == pytest.approx(90.0)
        obj = update_object(self._held_bar(0.0), Pose.identity(), holder)
        np.testing.assert_allclose(obj.p2, obj.p1 + [0, 0, -0.1], atol=1e-12)

    def test_half_stiffness_horizontal(self):
        holder = pose_with_z([0, 0, 0.4], [1.0, 0, 0])
        assert pendent_angle(self._held_bar(0.5), holder) == pytest.approx(45.0)

    def test_monotone_in_stiffness(self):
        holder = pose_with_z([0, 0, 0.4], [1.0, 0.2, 0.1])
        angles = [pendent_angle(self._held_bar(s), holder) for s in np.linspace(0, 1, 11)]
        assert all(a >= b - 1e-12 for a, b in zip(angles, angles[1:]))

    def test_requires_exactly_one_grasp(self):
        holder = pose_with_z([0, 0, 0.4], [1.0, 0, 0])
        with pytest.raises(GraspStateError):
            pendent_angle(bar(), holder)
        with pytest.raises(GraspStateError):
            pendent_angle(
                bar(end1_grasp=GraspedBy.RIGHT, end2_grasp=GraspedBy.LEFT), holder
            )


class TestUpdateObject:
    def test_both_grasped_straight(self):
        obj = bar(end1_grasp=GraspedBy.RIGHT, end2_grasp=GraspedBy.LEFT)
        right = pose_with_z([0.0, 0, 0.3], [0, 1.0, 0])
        left = pose_with_z([0.0, 0.1, 0.3], [0, 1.0, 0])
        out = update_object(obj, left, right)
        np.testing.assert_array_equal(out.p1, right.position)
        np.testing.assert_array_equal(out.p2, left.position)

    def test_single_grasp_pendent_soft(self):
        obj = bar(s=0.0, end1_grasp=GraspedBy.RIGHT)
        right = pose_with_z([0.2, 0, 0.5], [0, 1.0, 0])
        out = update_object(obj, Pose.identity(), right)
        np.testing.assert_allclose(out.p2, [0.2, 0, 0.4], atol=1e-12)

    def test_free_end_at_end1(self):
        obj = bar(s=1.0, end2_grasp=GraspedBy.LEFT)
        left = pose_with_z([0.2, 0, 0.5], [0, 1.0, 0])
        out = update_object(obj, left, Pose.identity())
        np.testing.assert_array_equal(out.p2, left.position)
        # rigid: free end opposite the tool axis
        np.testing.assert_allclose(out.p1, [0.2, -0.1, 0.5], atol=1e-12)

    def test_overstretch_raises(self):
        obj = bar(end1_grasp=GraspedBy.RIGHT, end2_grasp=GraspedBy.LEFT)
        right = pose_with_z([0.0, 0, 0.3], [0, 1.0, 0])
        left = pose_with_z([0.0, 0.12, 0.3], [0, 1.0, 0])
        with pytest.raises(OverstretchError):
            update_object(obj, left, right)

    def test_no_grasp_returns_same_object(self):
        obj = bar()
        assert update_object(obj, Pose.identity(), Pose.identity()) is obj

    def test_grasped_end_tracking_bit_exact(self):
        obj = bar(s=0.4, end1_grasp=GraspedBy.RIGHT)
        rng = np.random.default_rng(53)
        for _ in range(20):
            p = rng.uniform(-0.5, 0.5, size=3)
            right = pose_with_z(p, rng.normal(size=3))
            out = update_object(obj, Pose.identity(), right)
            assert np.array_equal(out.p1, right.position)

    def test_misgrasp_offset_tilts_droop(self):
        straight = bar(s=1.0, end1_grasp=GraspedBy.RIGHT)
        offset = bar(s=1.0, end1_grasp=GraspedBy.RIGHT, misgrasp_offset_deg=10.0)
        right = pose_with_z([0, 0, 0.4], [1.0, 0, 0])
        a = update_object(straight, Pose.identity(), right)
        b = update_object(offset, Pose.identity(), right)
        ang = angle_between(a.p2 - a.p1, b.p2 - b.p1)
        assert ang == pytest.approx(10.0, abs=1e-9)


class TestDroopDirection:
    def test_vertical_axis_unchanged(self):
        d = droop_direction(np.array([0.0, 0.0, 1.0]), 0.0)
        np.testing.assert_allclose(d, [0, 0, 1.0], atol=1e-12)

    def test_unit_norm(self):
        rng = np.random.default_rng(54)
        for _ in range(100):
            d = droop_direction(rng.normal(size=3), rng.uniform(0, 1))
            assert np.linalg.norm(d) == pytest.approx(1.0, abs=1e-12)

import numpy as np
import pytest

from dualtwist.errors import TraceFormatError
from dualtwist.kinematics import JointConfig, Pose, forward_kinematics
from dualtwist.teleop import (
    MasterCommand,
    WorkspaceMap,
    map_master_to_slave,
    read_trace,
    slave_target_config,
    write_trace,
)
from dualtwist.transforms import frame_from_z, quat_from_matrix, quat_from_axis_angle


def cmd(pos, quat=(1.0, 0, 0, 0), gripper=0.0, clutch=True, tick=0):
    return MasterCommand(
        tick=tick, pose=Pose(np.asarray(pos, float), np.asarray(quat, float)), gripper=gripper, clutch=clutch
    )


class TestWorkspaceMapping:
    def _engaged_map(self, scale=1.0):
        wmap = WorkspaceMap(scale=scale)
        anchor_m = Pose(np.array([0.1, 0.2, 0.3]), np.array([1.0, 0, 0, 0]))
        anchor_s = Pose(np.array([0.5, -0.1, 0.4]), quat_from_matrix(frame_from_z([0, 1.0, 0])))
        wmap.engage(anchor_m, anchor_s)
        return wmap, anchor_m, anchor_s

    def test_identity_at_engage(self):
        wmap, anchor_m, anchor_s = self._engaged_map()
        out = map_master_to_slave(cmd(anchor_m.position, anchor_m.quaternion), wmap)
        np.testing.assert_allclose(out.position, anchor_s.position, atol=1e-12)
        np.testing.assert_allclose(out.quaternion, anchor_s.quaternion, atol=1e-12)

    def test_position_delta_scaled(self):
        wmap, anchor_m, anchor_s = self._engaged_map(scale=2.0)
        out = map_master_to_slave(cmd(anchor_m.position + [0.1, 0, 0]), wmap)
        np.testing.assert_allclose(out.position, anchor_s.position + [0.2, 0, 0], atol=1e-12)

    def test_orientation_delta_unscaled(self):
        wmap, anchor_m, anchor_s = self._engaged_map(scale=2.0)
        dq = quat_from_axis_angle(np.array([0, 0, 1.0]), 0.3)
        out = map_master_to_slave(cmd(anchor_m.position, dq), wmap)
        # world-frame delta applied to the slave anchor
        expected = np.array(
            [
                [np.cos(0.3), -np.sin(0.3), 0],
                [np.sin(0.3), np.cos(0.3), 0],
                [0, 0, 1.0],
            ]
        ) @ anchor_s.rotation
        np.testing.assert_allclose(out.rotation, expected, atol=1e-12)

    def test_disengaged_returns_none(self):
        wmap = WorkspaceMap()
        assert map_master_to_slave(cmd([0, 0, 0], clutch=False), wmap) is None
        assert map_master_to_slave(cmd([0, 0, 0], clutch=True), wmap) is None  # no anchor yet

    def test_reengage_continuity(self):
        wmap, anchor_m, anchor_s = self._engaged_map()
        # move, disengage, wander, re-engage elsewhere: target continuous at engage
        wandered = Pose(np.array([9.0, 9.0, 9.0]), np.array([1.0, 0, 0, 0]))
        slave_now = Pose(np.array([0.5, 0.0, 0.4]), anchor_s.quaternion)
        wmap.disengage()
        wmap.engage(wandered, slave_now)
        out = map_master_to_slave(cmd(wandered.position, wandered.quaternion), wmap)
        np.testing.assert_allclose(out.position, slave_now.position, atol=1e-12)

    def test_equal_master_deltas_equal_slave_deltas(self):
        wmap, anchor_m, _ = self._engaged_map(scale=1.5)
        rng = np.random.default_rng(71)
        delta = rng.normal(size=3) * 0.05
        a = map_master_to_slave(cmd(anchor_m.position + delta), wmap)
        b = map_master_to_slave(cmd(anchor_m.position + 2 * delta), wmap)
        np.testing.assert_allclose(
            b.position - a.position, 1.5 * delta, atol=1e-9
        )


class TestSlaveTargetConfig:
    def test_fixed_point_returns_current(self, left_chain):
        current = JointConfig(np.array([-0.04, 1.2, 0.06, -1.89, 0.03, 0.69, -0.03]))
        pose = forward_kinematics(left_chain, current)
        config, verdict = slave_target_config(pose, current, left_chain)
        assert verdict == "ok"
        np.testing.assert_array_equal(config.angles, current.angles)

    def test_small_step_accepted_within_bound(self, left_chain):
        current = JointConfig(np.array([-0.04, 1.2, 0.06, -1.89, 0.03, 0.69, -0.03]))
        pose = forward_kinematics(left_chain, current)
        near = Pose(pose.position + [0.001, 0, 0], pose.quaternion)
        config, verdict = slave_target_config(near, current, left_chain)
        assert verdict == "ok"
        assert float(np.max(np.abs(config.angles - current.angles))) <= 0.05

    def test_large_jump_rejected(self, left_chain):
        current = JointConfig(np.array([-0.04, 1.2, 0.06, -1.89, 0.03, 0.69, -0.03]))
        pose = forward_kinematics(left_chain, current)
        far = Pose(pose.position + [0.15, 0, 0], pose.quaternion)
        config, verdict = slave_target_config(far, current, left_chain)
        assert config is None
        assert verdict.startswith("rejected")

    def test_unreachable_rejected(self, left_chain):
        current = JointConfig(np.zeros(7))
        target = Pose(np.array([5.0, 0, 0]), np.array([1.0, 0, 0, 0]))
        config, verdict = slave_target_config(target, current, left_chain)
        assert config is None
        assert "unreachable" in verdict


class TestTraceRoundTrip:
    def _commands(self):
        rng = np.random.default_rng(72)
        out = []
        for t in range(20):
            q = rng.normal(size=4)
            q /= np.linalg.norm(q)
            out.append(
                MasterCommand(
                    tick=t * 3 + 1,
                    pose=Pose(rng.normal(size=3), q),
                    gripper=float(rng.uniform(0, 1)),
                    clutch=bool(rng.integers(0, 2)),
                )
            )
        return out

    def test_round_trip_bit_identical(self, tmp_path):
        path = tmp_path / "t.trace"
        commands = self._commands()
        write_trace(path, commands)
        back = read_trace(path)
        assert len(back) == len(commands)
        for a, b in zip(commands, back):
            assert a.tick == b.tick
            assert np.array_equal(a.pose.position, b.pose.position)
            assert np.array_equal(a.pose.quaternion, b.pose.quaternion)
            assert a.gripper == b.gripper
            assert a.clutch == b.clutch

    def test_empty_trace(self, tmp_path):
        path = tmp_path / "empty.trace"
        write_trace(path, [])
        assert read_trace(path) == []

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "bad.trace"
        path.write_text(
            "# dualtwist-trace v1: tick px py pz qw qx qy qz gripper clutch\n"
            "1 0.0 0.0 0.0 1.0 0.0 0.0 0.0 0.0 0\n"
            "2 0.0 nope 0.0 1.0 0.0 0.0 0.0 0.0 0\n"
        )
        with pytest.raises(TraceFormatError) as exc:
            read_trace(path)
        assert exc.value.line_number == 3

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "nohdr.trace"
        path.write_text("1 0 0 0 1 0 0 0 0 0\n")
        with pytest.raises(TraceFormatError):
            read_trace(path)

    def test_nonmonotone_ticks_rejected(self, tmp_path):
        path = tmp_path / "ticks.trace"
        path.write_text(
            "# dualtwist-trace v1: tick px py pz qw qx qy qz gripper clutch\n"
            "5 0.0 0.0 0.0 1.0 0.0 0.0 0.0 0.0 0\n"
            "5 0.0 0.0 0.0 1.0 0.0 0.0 0.0 0.0 0\n"
        )
        with pytest.raises(TraceFormatError):
            read_trace(path)

    def test_gripper_range_validated(self):
        with pytest.raises(ValueError):
            MasterCommand(tick=0, pose=Pose.identity(), gripper=1.5, clutch=False)

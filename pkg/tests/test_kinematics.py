"""Forward/inverse kinematics against an independent transform-product oracle."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lampbot import (
    InvalidConfig,
    Unreachable,
    clamp,
    forward_kinematics,
    inverse_kinematics,
    reachable,
)
from lampbot.kinematics import (
    chain_from_dict,
    chain_points,
    chain_to_dict,
    batch_head_poses,
    gaze_ik,
    load_chain,
    save_chain,
)

from conftest import random_joint_vectors
from oracles import fk_oracle


def _oracle_pose(chain, q):
    joints = [{"axis": list(j.axis), "offset": list(j.offset)} for j in chain.joints]
    return fk_oracle.head_pose(joints, chain.head_offset, chain.forward_axis, q)


class TestForwardKinematics:
    def test_zero_pose_is_sum_of_offsets(self, chain):
        pose = forward_kinematics(chain, np.zeros(6))
        expected = chain.head_offset.copy()
        for joint in chain.joints:
            expected = expected + joint.offset
        np.testing.assert_allclose(pose.position, expected, atol=1e-12)
        np.testing.assert_allclose(pose.facing, chain.forward_axis, atol=1e-12)

    def test_base_yaw_quarter_turn_rotates_about_vertical(self, chain):
        zero = forward_kinematics(chain, np.zeros(6))
        q = np.zeros(6)
        q[0] = np.pi / 2
        turned = forward_kinematics(chain, q)
        # rotating 90 degrees about z maps (x, y) to (-y, x) and keeps height
        np.testing.assert_allclose(
            turned.position,
            [-zero.position[1], zero.position[0], zero.position[2]],
            atol=1e-12,
        )
        assert turned.position[2] == pytest.approx(zero.position[2])

    def test_matches_transform_product_oracle(self, chain, rng):
        for q in random_joint_vectors(chain, rng, 100):
            pose = forward_kinematics(chain, q)
            position, facing = _oracle_pose(chain, q)
            np.testing.assert_allclose(pose.position, position, atol=1e-9)
            np.testing.assert_allclose(pose.facing, facing, atol=1e-9)

    def test_deterministic_bit_identical(self, chain, rng):
        q = random_joint_vectors(chain, rng, 1)[0]
        a = forward_kinematics(chain, q)
        b = forward_kinematics(chain, q)
        assert a.position.tobytes() == b.position.tobytes()
        assert a.facing.tobytes() == b.facing.tobytes()

    def test_batch_matches_single(self, chain, rng):
        Q = random_joint_vectors(chain, rng, 32)
        positions, facings = batch_head_poses(chain, Q)
        for i, q in enumerate(Q):
            pose = forward_kinematics(chain, q)
            np.testing.assert_allclose(positions[i], pose.position, atol=1e-12)
            np.testing.assert_allclose(facings[i], pose.facing, atol=1e-12)

    def test_positions_inside_reach_sphere(self, chain, rng):
        radius = chain.max_reach
        samples = rng.normal(scale=3.0, size=(500, chain.dof))
        for raw in samples:
            pose = forward_kinematics(chain, clamp(chain, raw))
            assert np.linalg.norm(pose.position) <= radius + 1e-9

    def test_chain_points_end_at_head(self, chain, rng):
        for q in random_joint_vectors(chain, rng, 10):
            points = chain_points(chain, q)
            pose = forward_kinematics(chain, q)
            np.testing.assert_allclose(points[-1], pose.position, atol=1e-12)
            assert points.shape == (chain.dof + 2, 3)


class TestClamp:
    @given(st.lists(st.floats(-10, 10), min_size=6, max_size=6))
    @settings(max_examples=100, deadline=None)
    def test_idempotent_and_within_limits(self, values):
        from lampbot import default_chain

        chain = default_chain()
        q = clamp(chain, np.array(values))
        np.testing.assert_array_equal(q, clamp(chain, q))
        assert np.all(q >= chain.lower_limits)
        assert np.all(q <= chain.upper_limits)


class TestInverseKinematics:
    def test_fixed_point_returns_seed(self, chain, rng):
        for q in random_joint_vectors(chain, rng, 10):
            goal = forward_kinematics(chain, q).position
            solved = inverse_kinematics(chain, goal, q)
            assert np.max(np.abs(solved - q)) < 1e-6

    def test_round_trip_from_arbitrary_seeds(self, chain, rng):
        goals = random_joint_vectors(chain, rng, 200)
        seeds = random_joint_vectors(chain, rng, 200)
        failures = 0
        for q_goal, seed in zip(goals, seeds):
            target = forward_kinematics(chain, q_goal).position
            try:
                solved = inverse_kinematics(chain, target, seed)
            except Unreachable:
                failures += 1
                continue
            pose = forward_kinematics(chain, solved)
            assert np.linalg.norm(pose.position - target) < 1e-3
            assert np.all(solved >= chain.lower_limits - 1e-12)
            assert np.all(solved <= chain.upper_limits + 1e-12)
        assert failures <= 2  # at least 99% of 200 must solve

    def test_unreachable_raises_with_best_effort(self, chain):
        far = np.array([1.5, 0.4, 0.3])
        with pytest.raises(Unreachable) as info:
            inverse_kinematics(chain, far, np.zeros(6))
        assert info.value.best_q is not None
        best = forward_kinematics(chain, info.value.best_q)
        # the best-effort pose strains toward the target
        assert np.linalg.norm(best.position - far) < np.linalg.norm(far)


class TestReachable:
    def test_true_for_poses_sampled_inside_limits(self, chain, rng):
        for q in random_joint_vectors(chain, rng, 500):
            point = forward_kinematics(chain, q).position
            assert reachable(chain, point)

    def test_false_beyond_reach(self, chain):
        assert not reachable(chain, np.array([2.0, 0.0, 0.2]))

    def test_single_transition_along_ray(self, chain):
        # sweep outward along a horizontal ray at base height
        direction = np.array([1.0, 0.0, 0.0])
        origin = np.array([0.0, 0.0, 0.11])
        flags = []
        for r in np.arange(0.2, 1.0, 0.02):
            flags.append(reachable(chain, origin + r * direction))
        transitions = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
        assert flags[0] is True
        assert flags[-1] is False
        assert transitions == 1


class TestGaze:
    def test_head_faces_target(self, chain):
        q0 = np.array([0.0, -0.5, 1.1, 0.0, 0.9, 0.0])
        target = np.array([0.1, 0.5, 0.3])
        q = gaze_ik(chain, q0, target)
        pose = forward_kinematics(chain, q)
        direction = target - pose.position
        direction /= np.linalg.norm(direction)
        assert float(pose.facing @ direction) > 0.97


class TestChainConfig:
    def test_round_trip_bit_exact(self, chain, tmp_path):
        path = tmp_path / "chain.json"
        save_chain(chain, path)
        loaded = load_chain(path)
        second = tmp_path / "chain2.json"
        save_chain(loaded, second)
        assert path.read_bytes() == second.read_bytes()
        for a, b in zip(chain.joints, loaded.joints):
            np.testing.assert_array_equal(a.axis, b.axis)
            np.testing.assert_array_equal(a.offset, b.offset)
            assert a.limits == b.limits
            assert a.max_speed == b.max_speed

    def test_rejects_unknown_major_version(self, chain):
        doc = chain_to_dict(chain)
        doc["version"] = "2.0"
        with pytest.raises(InvalidConfig):
            chain_from_dict(doc)

    def test_rejects_wrong_format(self, chain):
        doc = chain_to_dict(chain)
        doc["format"] = "something.else"
        with pytest.raises(InvalidConfig):
            chain_from_dict(doc)

    def test_rejects_bad_limits(self, chain):
        doc = chain_to_dict(chain)
        doc["joints"][0]["limits"] = [1.0, -1.0]
        with pytest.raises(InvalidConfig):
            chain_from_dict(doc)

    def test_rejects_non_unit_axis(self, chain):
        doc = chain_to_dict(chain)
        doc["joints"][2]["axis"] = [0.0, 2.0, 0.0]
        with pytest.raises(InvalidConfig):
            chain_from_dict(doc)

"""Versioned JSON documents, canonical bytes, and digests."""

import json

import numpy as np
import pytest

from lampbot.errors import InvalidConfig
from lampbot.kinematics import default_chain
from lampbot.serialize import (
    TRAJECTORY_FORMAT,
    check_version,
    digest_bytes,
    digest_doc,
    digest_file,
    dumps_canonical,
    load_json,
    save_json,
    tool_from_dict,
    tool_to_dict,
    trajectory_from_dict,
    trajectory_to_dict,
    version_stamp,
    world_from_dict,
    world_to_dict,
)
from lampbot.trajectory import Annotation, State, ToolState, Trajectory, WorldState, interpolate

CHAIN = default_chain()


def make_trajectory():
    world = WorldState(
        user_position=np.array([0.9, 0.6, 0.45]),
        objects={"cup": np.array([0.45, -0.25, 0.12])},
        beat_times=[0.5, 1.0],
    )
    tool = ToolState(light_on=True, light_intensity=0.8)
    traj = interpolate(
        CHAIN,
        np.zeros(CHAIN.dof),
        np.array([0.4, -0.3, 0.5, 0.2, -0.1, 0.3]),
        tool=tool,
        world=world,
    )
    traj.annotations.append(Annotation(0.1, 0.5, "Nod", "nod mid"))
    return traj


class TestToolWorld:
    def test_tool_round_trip(self):
        tool = ToolState(light_on=True, light_intensity=0.5, projector_on=True, projected_content="clip")
        assert tool_from_dict(tool_to_dict(tool)) == tool

    def test_tool_rejects_unknown_field(self):
        with pytest.raises(InvalidConfig):
            tool_from_dict({"light_on": True, "laser": 1})

    def test_world_round_trip(self):
        world = WorldState(
            user_position=np.array([1.0, 2.0, 3.0]),
            objects={"b": np.array([0.1, 0.2, 0.3]), "a": np.array([4.0, 5.0, 6.0])},
        )
        back = world_from_dict(world_to_dict(world))
        assert np.array_equal(back.user_position, world.user_position)
        assert set(back.objects) == {"a", "b"}
        assert np.array_equal(back.objects["a"], world.objects["a"])

    def test_world_rejects_bad_point(self):
        with pytest.raises(InvalidConfig):
            world_from_dict({"user_position": [1.0, 2.0]})
        with pytest.raises(InvalidConfig):
            world_from_dict({"objects": {"x": [1.0, float("nan"), 0.0]}})


class TestTrajectoryDoc:
    def test_round_trip_is_bit_exact(self):
        traj = make_trajectory()
        doc = trajectory_to_dict(traj, chain_id=CHAIN.id)
        back = trajectory_from_dict(json.loads(dumps_canonical(doc)))
        assert back.dt == traj.dt
        assert len(back.samples) == len(traj.samples)
        for a, b in zip(traj.samples, back.samples):
            assert np.array_equal(a.q, b.q)
            assert a.tool == b.tool
        assert back.annotations == traj.annotations

    def test_world_survives(self):
        traj = make_trajectory()
        back = trajectory_from_dict(trajectory_to_dict(traj, chain_id=CHAIN.id))
        world = back.samples[0].world
        assert world is not None
        assert np.allclose(world.user_position, [0.9, 0.6, 0.45])
        assert world.beat_times == [0.5, 1.0]
        # the snapshot is stored once and shared across samples
        assert all(s.world is world for s in back.samples)

    def test_version_checked(self):
        doc = trajectory_to_dict(make_trajectory(), chain_id=CHAIN.id)
        wrong = dict(doc, format="lampbot.other")
        with pytest.raises(InvalidConfig):
            trajectory_from_dict(wrong)
        newer = dict(doc, version="2.0")
        with pytest.raises(InvalidConfig):
            trajectory_from_dict(newer)
        minor = dict(doc, version="1.7")
        trajectory_from_dict(minor)  # minor bumps stay readable

    def test_check_version_requires_mapping(self):
        with pytest.raises(InvalidConfig):
            check_version(["not", "a", "doc"], TRAJECTORY_FORMAT)

    def test_stamp_matches_checker(self):
        doc = version_stamp(TRAJECTORY_FORMAT)
        check_version(dict(doc, extra=1), TRAJECTORY_FORMAT)


class TestCanonicalBytes:
    def test_dumps_canonical_sorts_keys(self):
        a = dumps_canonical({"b": 1, "a": [1.5, 2.25]})
        b = dumps_canonical({"a": [1.5, 2.25], "b": 1})
        assert a == b
        assert a.endswith("\n")

    def test_same_doc_same_digest(self):
        traj = make_trajectory()
        d1 = digest_doc(trajectory_to_dict(traj, chain_id=CHAIN.id))
        d2 = digest_doc(trajectory_to_dict(traj.copy(), chain_id=CHAIN.id))
        assert d1 == d2
        assert len(d1) == 64

    def test_digest_bytes_known_value(self):
        # sha256 of the empty string is a fixed reference point
        assert digest_bytes(b"") == (
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        )

    def test_file_round_trip(self, tmp_path):
        doc = {"format": "lampbot.metrics", "version": "1.0", "value": 0.1 + 0.2}
        path = tmp_path / "doc.json"
        save_json(path, doc)
        assert load_json(path) == doc
        assert digest_file(path) == digest_bytes(path.read_bytes())

    def test_load_rejects_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(InvalidConfig):
            load_json(path)

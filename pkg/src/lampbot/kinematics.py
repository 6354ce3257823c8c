"""Serial-chain kinematics for the lamp robot.

The chain is a fixed sequence of revolute joints. Each joint rotates about a
unit axis expressed in its parent frame, then translates by a fixed offset to
the next joint. The head pose is the final translated point plus a forward
axis rotated into the world frame.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, InvalidInput, Unreachable

CHAIN_FORMAT = "lampbot.chain"
CHAIN_MAJOR_VERSION = 1

# Damped least squares parameters; damping trades convergence speed for
# stability near singular stretches of the workspace.
IK_DAMPING = 0.05
IK_MAX_ITERATIONS = 300
IK_STEP_CLAMP = 0.2  # rad, per-iteration infinity-norm bound on dq
DEFAULT_IK_TOL = 1e-3  # meters
DEFAULT_FACING_TOL = 0.08  # rad


@dataclass(frozen=True)
class Pose:
    """Head pose: a world position and a unit facing direction."""

    position: np.ndarray
    facing: np.ndarray


@dataclass(frozen=True)
class JointSpec:
    name: str
    axis: np.ndarray          # unit rotation axis in the parent frame
    offset: np.ndarray        # translation to the next joint, meters
    limits: tuple[float, float]  # (lower, upper), radians
    max_speed: float          # rad/s


@dataclass(frozen=True)
class ChainSpec:
    """Geometry, limits, and gesture-axis mapping for one robot chain."""

    id: str
    joints: tuple[JointSpec, ...]
    head_offset: np.ndarray   # translation from last joint to head point
    forward_axis: np.ndarray  # head facing direction in the final frame
    gestures: dict = field(default_factory=dict)

    @property
    def dof(self) -> int:
        return len(self.joints)

    @property
    def lower_limits(self) -> np.ndarray:
        return np.array([j.limits[0] for j in self.joints])

    @property
    def upper_limits(self) -> np.ndarray:
        return np.array([j.limits[1] for j in self.joints])

    @property
    def max_speeds(self) -> np.ndarray:
        return np.array([j.max_speed for j in self.joints])

    @property
    def max_reach(self) -> float:
        reach = float(np.linalg.norm(self.head_offset))
        for j in self.joints:
            reach += float(np.linalg.norm(j.offset))
        return reach

    def gesture_joint(self, name: str) -> tuple[int, float]:
        """Return (joint index, sign) for a named gesture axis."""
        if name not in self.gestures:
            raise InvalidInput(f"chain {self.id!r} has no gesture axis {name!r}")
        entry = self.gestures[name]
        return int(entry["joint"]), float(entry.get("sign", 1.0))

    def dance_axes(self) -> list[tuple[int, float]]:
        """Joint/scale pairs used for rhythmic whole-body oscillation."""
        entries = self.gestures.get("dance")
        if not entries:
            index, sign = self.gesture_joint("shake")
            return [(index, sign)]
        return [(int(e["joint"]), float(e.get("scale", 1.0))) for e in entries]


def _as_q(chain: ChainSpec, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (chain.dof,):
        raise InvalidInput(f"expected joint vector of shape ({chain.dof},), got {q.shape}")
    if not np.all(np.isfinite(q)):
        raise InvalidInput("joint vector contains non-finite values")
    return q


def rotation_about_axis(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation matrix about a unit axis (Rodrigues form)."""
    x, y, z = axis
    c = math.cos(angle)
    s = math.sin(angle)
    t = 1.0 - c
    return np.array([
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ])


def clamp(chain: ChainSpec, q) -> np.ndarray:
    """Clamp a joint vector to the chain's limits. Idempotent."""
    q = _as_q(chain, q)
    return np.clip(q, chain.lower_limits, chain.upper_limits)


def within_limits(chain: ChainSpec, q, tol: float = 1e-9) -> bool:
    q = np.asarray(q, dtype=float)
    return bool(np.all(q >= chain.lower_limits - tol) and np.all(q <= chain.upper_limits + tol))


def _frames(chain: ChainSpec, q: np.ndarray):
    """Accumulated rotation, joint origins, and world axes along the chain.

    Returns (R, p, origins, axes) where origins[i]/axes[i] describe joint i's
    rotation axis in world coordinates, and (R, p) map the final frame.
    """
    R = np.eye(3)
    p = np.zeros(3)
    origins = np.zeros((chain.dof, 3))
    axes = np.zeros((chain.dof, 3))
    for i, joint in enumerate(chain.joints):
        origins[i] = p
        axes[i] = R @ joint.axis
        R = R @ rotation_about_axis(joint.axis, q[i])
        p = p + R @ joint.offset
    return R, p, origins, axes


def forward_kinematics(chain: ChainSpec, q) -> Pose:
    """Head pose for a joint vector. Pure and deterministic."""
    q = _as_q(chain, q)
    R, p, _, _ = _frames(chain, q)
    position = p + R @ chain.head_offset
    facing = R @ chain.forward_axis
    return Pose(position=position, facing=facing)


def chain_points(chain: ChainSpec, q) -> np.ndarray:
    """World positions of the base, each joint origin's successor, and the head.

    Shape (dof + 2, 3); consecutive rows are the rendered link segments.
    """
    q = _as_q(chain, q)
    points = np.zeros((chain.dof + 2, 3))
    R = np.eye(3)
    p = np.zeros(3)
    for i, joint in enumerate(chain.joints):
        R = R @ rotation_about_axis(joint.axis, q[i])
        p = p + R @ joint.offset
        points[i + 1] = p
    points[-1] = p + R @ chain.head_offset
    return points


def batch_head_poses(chain: ChainSpec, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized head positions and facings for an (N, dof) array of joint vectors."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[1] != chain.dof:
        raise InvalidInput(f"expected joint array of shape (N, {chain.dof})")
    n = Q.shape[0]
    R = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
    p = np.zeros((n, 3))
    eye = np.eye(3)
    for i, joint in enumerate(chain.joints):
        x, y, z = joint.axis
        k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
        c = np.cos(Q[:, i])[:, None, None]
        s = np.sin(Q[:, i])[:, None, None]
        rot = c * eye + s * k + (1.0 - c) * np.outer(joint.axis, joint.axis)
        R = R @ rot
        p = p + (R @ joint.offset)
    positions = p + R @ chain.head_offset
    facings = R @ chain.forward_axis
    return positions, facings


def _jacobians(chain: ChainSpec, q: np.ndarray):
    """Position and facing Jacobians at q, both shape (3, dof)."""
    R, p, origins, axes = _frames(chain, q)
    head = p + R @ chain.head_offset
    facing = R @ chain.forward_axis
    J_pos = np.cross(axes, head - origins).T
    J_face = np.cross(axes, facing).T
    return J_pos, J_face, head, facing


def _dls_step(J: np.ndarray, err: np.ndarray) -> np.ndarray:
    JJ = J @ J.T + (IK_DAMPING ** 2) * np.eye(J.shape[0])
    dq = J.T @ np.linalg.solve(JJ, err)
    peak = np.max(np.abs(dq))
    if peak > IK_STEP_CLAMP:
        dq *= IK_STEP_CLAMP / peak
    return dq


def _solve_position(chain, goal_pos, goal_facing, seed, tol, facing_tol, facing_weight=0.5):
    q = clamp(chain, seed)
    best_q = q.copy()
    best_err = math.inf
    for _ in range(IK_MAX_ITERATIONS):
        J_pos, J_face, head, facing = _jacobians(chain, q)
        e_pos = goal_pos - head
        pos_err = float(np.linalg.norm(e_pos))
        if goal_facing is None:
            converged = pos_err <= tol
            err = e_pos
            J = J_pos
        else:
            e_face = goal_facing - facing
            angle = math.acos(min(1.0, max(-1.0, float(facing @ goal_facing))))
            converged = pos_err <= tol and angle <= facing_tol
            err = np.concatenate([e_pos, facing_weight * e_face])
            J = np.vstack([J_pos, facing_weight * J_face])
        if pos_err < best_err:
            best_err = pos_err
            best_q = q.copy()
        if converged:
            return q, True, pos_err
        q = clamp(chain, q + _dls_step(J, err))
    return best_q, False, best_err


def _canonical_seeds(chain: ChainSpec) -> list[np.ndarray]:
    """Fixed seed set spanning the limit box, used for retries and reachability."""
    lo = chain.lower_limits
    hi = chain.upper_limits
    mid = 0.5 * (lo + hi)
    seeds = [
        clamp(chain, np.zeros(chain.dof)),
        mid,
        lo + 0.25 * (hi - lo),
        lo + 0.75 * (hi - lo),
        lo + np.where(np.arange(chain.dof) % 2 == 0, 0.25, 0.75) * (hi - lo),
        lo + np.where(np.arange(chain.dof) % 2 == 0, 0.75, 0.25) * (hi - lo),
    ]
    return seeds


def inverse_kinematics(
    chain: ChainSpec,
    goal,
    seed,
    tol: float = DEFAULT_IK_TOL,
    facing_tol: float = DEFAULT_FACING_TOL,
) -> np.ndarray:
    """Solve for joints reaching a goal position (optionally with a facing).

    `goal` is a Pose or a 3-vector position. Iterative damped least squares
    with per-iteration limit clamping; deterministic given inputs. On failure
    after the seed and a fixed set of canonical restarts, raises Unreachable
    carrying the best configuration found.
    """
    if isinstance(goal, Pose):
        goal_pos = np.asarray(goal.position, dtype=float)
        goal_facing = np.asarray(goal.facing, dtype=float)
        norm = np.linalg.norm(goal_facing)
        if norm == 0:
            raise InvalidInput("goal facing must be a nonzero vector")
        goal_facing = goal_facing / norm
    else:
        goal_pos = np.asarray(goal, dtype=float)
        goal_facing = None
    if goal_pos.shape != (3,) or not np.all(np.isfinite(goal_pos)):
        raise InvalidInput("goal position must be a finite 3-vector")

    seed = _as_q(chain, seed)
    best_q = None
    best_err = math.inf
    for candidate in [seed] + _canonical_seeds(chain):
        q, ok, err = _solve_position(chain, goal_pos, goal_facing, candidate, tol, facing_tol)
        if ok:
            # Round-trip contract: a successful solve must land within tol.
            check = forward_kinematics(chain, q)
            assert np.linalg.norm(check.position - goal_pos) <= tol
            return q
        if err < best_err:
            best_err = err
            best_q = q
    raise Unreachable(
        f"goal position {goal_pos.tolist()} not reached (best error {best_err:.4f} m)",
        best_q=best_q,
        best_error=best_err,
    )


def gaze_ik(chain: ChainSpec, seed, target_point, angle_tol: float = 0.03) -> np.ndarray:
    """Find joints near `seed` whose head faces a world point.

    Alignment-only solve: the head position is free to drift. Returns the
    best configuration found even if the angle tolerance is not met exactly.
    """
    target_point = np.asarray(target_point, dtype=float)
    q = clamp(chain, _as_q(chain, seed))
    best_q = q.copy()
    best_angle = math.inf
    for _ in range(IK_MAX_ITERATIONS):
        _, J_face, head, facing = _jacobians(chain, q)
        to_target = target_point - head
        dist = np.linalg.norm(to_target)
        if dist < 1e-9:
            break  # degenerate: head is at the target point
        desired = to_target / dist
        angle = math.acos(min(1.0, max(-1.0, float(facing @ desired))))
        if angle < best_angle:
            best_angle = angle
            best_q = q.copy()
        if angle <= angle_tol:
            break
        q = clamp(chain, q + _dls_step(J_face, desired - facing))
    return best_q


def reachable(chain: ChainSpec, point, tol: float = DEFAULT_IK_TOL) -> bool:
    """Whether a world position is reachable within limits.

    True iff inverse kinematics succeeds from the canonical seed set.
    """
    point = np.asarray(point, dtype=float)
    if np.linalg.norm(point) > chain.max_reach + tol:
        return False
    try:
        inverse_kinematics(chain, point, _canonical_seeds(chain)[0], tol=tol)
        return True
    except Unreachable:
        return False


# --- chain configuration documents -----------------------------------------

def _check_version(doc: dict, expected_format: str, major: int) -> None:
    if doc.get("format") != expected_format:
        raise InvalidConfig(f"expected format {expected_format!r}, got {doc.get('format')!r}")
    version = str(doc.get("version", ""))
    head = version.split(".", 1)[0]
    if not head.isdigit() or int(head) != major:
        raise InvalidConfig(f"unsupported {expected_format} version {version!r}")


def chain_from_dict(doc: dict) -> ChainSpec:
    _check_version(doc, CHAIN_FORMAT, CHAIN_MAJOR_VERSION)
    joints = []
    for entry in doc["joints"]:
        axis = np.asarray(entry["axis"], dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise InvalidConfig(f"joint {entry['name']!r} axis must be a unit vector")
        lo, hi = float(entry["limits"][0]), float(entry["limits"][1])
        if not lo < hi:
            raise InvalidConfig(f"joint {entry['name']!r} limits must satisfy lower < upper")
        speed = float(entry["max_speed"])
        if speed <= 0:
            raise InvalidConfig(f"joint {entry['name']!r} max_speed must be positive")
        joints.append(JointSpec(
            name=str(entry["name"]),
            axis=axis,
            offset=np.asarray(entry["offset"], dtype=float),
            limits=(lo, hi),
            max_speed=speed,
        ))
    return ChainSpec(
        id=str(doc["id"]),
        joints=tuple(joints),
        head_offset=np.asarray(doc["head_offset"], dtype=float),
        forward_axis=np.asarray(doc["forward_axis"], dtype=float),
        gestures=doc.get("gestures", {}),
    )


def chain_to_dict(chain: ChainSpec) -> dict:
    return {
        "format": CHAIN_FORMAT,
        "version": f"{CHAIN_MAJOR_VERSION}.0",
        "id": chain.id,
        "joints": [
            {
                "name": j.name,
                "axis": list(j.axis),
                "offset": list(j.offset),
                "limits": list(j.limits),
                "max_speed": j.max_speed,
            }
            for j in chain.joints
        ],
        "head_offset": list(chain.head_offset),
        "forward_axis": list(chain.forward_axis),
        "gestures": chain.gestures,
    }


def load_chain(path) -> ChainSpec:
    with open(path, "r", encoding="utf-8") as f:
        return chain_from_dict(json.load(f))


def save_chain(chain: ChainSpec, path) -> None:
    Path(path).write_text(json.dumps(chain_to_dict(chain), indent=2) + "\n", encoding="utf-8")


def default_chain() -> ChainSpec:
    """The packaged six-joint desk lamp chain."""
    text = resources.files("lampbot.data").joinpath("default_chain.json").read_text("utf-8")
    return chain_from_dict(json.loads(text))

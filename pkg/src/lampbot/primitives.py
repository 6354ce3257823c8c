"""Expressive movement primitives layered onto base trajectories.

Every primitive preserves the terminal state exactly: gestures are inserted
as self-contained excursions that return to the pose they started from, with
joint offsets enveloped to zero by their final sample. The special anchor
"terminal-" plays a gesture at the goal pose but before the goal tool event,
so finishing flourishes never disturb the task outcome.

Anchors: "pre" (trajectory start), "mid" (halfway), "post" (after the final
state), "terminal-" (just before the final state), or a float time in
seconds snapped to the nearest sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import Infeasible, InvalidInput, TargetMissing
from .kinematics import (
    DEFAULT_IK_TOL,
    ChainSpec,
    _jacobians,
    _solve_position,
    forward_kinematics,
    gaze_ik,
)
from .trajectory import Annotation, State, ToolState, Trajectory, WorldState

ANCHORS = ("pre", "mid", "post", "terminal-")

PRIMITIVE_KINDS = (
    "Nod",
    "Shake",
    "LowerHead",
    "Lean",
    "Wag",
    "Stretch",
    "SpeedScale",
    "PauseInsert",
    "JerkPulse",
    "OrientToward",
    "PointAwayFrom",
    "Approach",
    "Avoid",
    "AttentionShift",
    "LightEmphasis",
)

# Parameter schema per kind: name -> (type, default, low, high). A None
# default marks the parameter as required. Exposed to clients for validation.
PARAM_SCHEMAS = {
    "Nod": {
        "amplitude": ("float", 0.25, 0.0, 1.2),
        "cycles": ("int", 2, 1, 8),
        "duration": ("float", 0.8, 0.1, 6.0),
    },
    "Shake": {
        "amplitude": ("float", 0.3, 0.0, 1.5),
        "cycles": ("int", 2, 1, 8),
        "duration": ("float", 0.9, 0.1, 6.0),
    },
    "LowerHead": {
        "amplitude": ("float", 0.5, 0.0, 1.5),
        "duration": ("float", 1.2, 0.1, 6.0),
    },
    "Lean": {
        "amplitude": ("float", 0.3, -1.2, 1.2),
        "duration": ("float", 1.0, 0.1, 6.0),
    },
    "Wag": {
        "amplitude": ("float", 0.4, 0.0, 1.5),
        "cycles": ("int", 3, 1, 10),
        "duration": ("float", 1.0, 0.1, 6.0),
    },
    "Stretch": {
        "target": ("str", "", None, None),
        "amplitude": ("float", 0.25, 0.0, 1.0),
        "cycles": ("int", 2, 1, 6),
        "duration": ("float", 1.2, 0.1, 6.0),
    },
    "SpeedScale": {
        "factor": ("float", 0.8, 0.05, 2.0),
    },
    "PauseInsert": {
        "duration": ("float", 0.5, 0.0, 6.0),
    },
    "JerkPulse": {
        "amplitude": ("float", 0.12, 0.0, 0.6),
        "cycles": ("int", 4, 1, 10),
        "duration": ("float", 0.35, 0.1, 2.0),
    },
    "OrientToward": {
        "target": ("str", None, None, None),
        "duration": ("float", 1.0, 0.2, 6.0),
    },
    "PointAwayFrom": {
        "target": ("str", None, None, None),
        "duration": ("float", 1.0, 0.2, 6.0),
    },
    "Approach": {
        "target": ("str", None, None, None),
        "duration": ("float", 1.2, 0.2, 6.0),
        "standoff": ("float", 0.07, 0.01, 0.5),
    },
    "Avoid": {
        "target": ("str", None, None, None),
        "duration": ("float", 1.0, 0.2, 6.0),
        "distance": ("float", 0.15, 0.02, 0.6),
    },
    "AttentionShift": {
        "from_target": ("str", "user", None, None),
        "to_target": ("str", None, None, None),
        "duration": ("float", 1.4, 0.4, 8.0),
    },
    "LightEmphasis": {
        "duration": ("float", 0.8, 0.1, 6.0),
        "peak": ("float", 1.0, 0.0, 1.0),
        "floor": ("float", 0.3, 0.0, 1.0),
    },
}


@dataclass(frozen=True)
class PrimitiveInstance:
    """One expressive gesture: a kind, parameters, and a time anchor."""

    kind: str
    params: dict = field(default_factory=dict)
    anchor: object = "mid"  # str anchor name or float seconds

    def label(self) -> str:
        target = self.params.get("target") or self.params.get("to_target")
        return f"{self.kind}({target})" if target else self.kind


def validate_params(kind: str, params: dict) -> dict:
    """Merge params with schema defaults; reject unknown names and bad ranges."""
    if kind not in PARAM_SCHEMAS:
        raise InvalidInput(f"unknown primitive kind {kind!r}")
    schema = PARAM_SCHEMAS[kind]
    for name in params:
        if name not in schema:
            raise InvalidInput(f"{kind} has no parameter {name!r}")
    out = {}
    for name, (typ, default, low, high) in schema.items():
        if name in params:
            value = params[name]
        elif default is None:
            raise InvalidInput(f"{kind} requires parameter {name!r}")
        else:
            value = default
        if typ == "float":
            value = float(value)
            if low is not None and not low <= value <= high:
                raise InvalidInput(f"{kind}.{name}={value} outside [{low}, {high}]")
        elif typ == "int":
            value = int(value)
            if low is not None and not low <= value <= high:
                raise InvalidInput(f"{kind}.{name}={value} outside [{low}, {high}]")
        else:
            value = str(value)
        out[name] = value
    return out


def _resolve_anchor(traj: Trajectory, anchor):
    last = len(traj.samples) - 1
    if isinstance(anchor, str):
        if anchor == "pre":
            return 0, "at"
        if anchor == "mid":
            return min(last, int(round(last / 2))), "at"
        if anchor == "post":
            return last, "append"
        if anchor == "terminal-":
            return last, "before_terminal"
        raise InvalidInput(f"unknown anchor {anchor!r}")
    t = float(anchor)
    if not 0.0 <= t <= traj.duration + 1e-9:
        raise InvalidInput(f"anchor time {t} outside trajectory [0, {traj.duration}]")
    return min(last, int(round(t / traj.dt))), "at"


def _require_target(world: WorldState | None, name: str) -> np.ndarray:
    if world is None:
        raise TargetMissing(f"primitive needs target {name!r} but no world was given")
    point = world.target_position(name)
    if point is None:
        raise TargetMissing(f"world has no target named {name!r}")
    return point


def _insert_segment(traj, index, mode, path, kind, label):
    """Insert gesture samples into a trajectory, preserving the terminal state.

    `path` has shape (n+1, dof) with path[0] == path[-1] == the anchor pose.
    Returns a new trajectory with shifted annotations plus one new span.
    """
    dt = traj.dt
    samples = traj.samples
    n = len(path) - 1
    if mode == "at":
        base = samples[index]
        inserted = [State(q=path[j].copy(), tool=base.tool, world=base.world) for j in range(1, n + 1)]
        new_samples = samples[: index + 1] + inserted + samples[index + 1 :]
        insert_time = index * dt
        added = n * dt
        span = (insert_time, insert_time + n * dt)
    elif mode == "before_terminal":
        terminal = samples[index]
        prior = samples[index - 1] if index > 0 else terminal
        inserted = [State(q=path[j].copy(), tool=prior.tool, world=prior.world) for j in range(n + 1)]
        new_samples = samples[:index] + inserted + [terminal]
        insert_time = index * dt
        added = (n + 1) * dt
        span = (insert_time, insert_time + n * dt)
    elif mode == "append":
        base = samples[-1]
        inserted = [State(q=path[j].copy(), tool=base.tool, world=base.world) for j in range(1, n + 1)]
        new_samples = samples + inserted
        insert_time = traj.duration
        added = n * dt
        span = (insert_time, insert_time + n * dt)
    else:
        raise InvalidInput(f"unknown insertion mode {mode!r}")

    annotations = []
    for a in traj.annotations:
        if a.start >= insert_time - 1e-9:
            annotations.append(replace(a, start=a.start + added, end=a.end + added))
        elif a.end > insert_time + 1e-9:
            annotations.append(replace(a, end=a.end + added))
        else:
            annotations.append(a)
    annotations.append(Annotation(start=span[0], end=span[1], kind=kind, label=label))
    return Trajectory(dt=dt, samples=new_samples, annotations=annotations)


def _hann(u: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * u))


def _rise_hold_fall(u: np.ndarray, go: float, hold: float) -> np.ndarray:
    """Raised-cosine rise to 1.0, plateau, raised-cosine fall back to 0."""
    fall = 1.0 - go - hold
    out = np.ones_like(u)
    rising = u < go
    falling = u > go + hold
    out[rising] = 0.5 * (1.0 - np.cos(np.pi * u[rising] / go))
    out[falling] = 0.5 * (1.0 + np.cos(np.pi * (u[falling] - go - hold) / fall))
    return out


def _dilated_path(chain, traj, duration, build):
    """Sample a gesture, stretching its duration until speed caps hold."""
    n = max(2, int(round(duration / traj.dt)))
    caps = chain.max_speeds
    for _ in range(6):
        path = build(n)
        speeds = np.max(np.abs(np.diff(path, axis=0)) / traj.dt, axis=0)
        ratio = float(np.max(speeds / caps))
        if ratio <= 1.0:
            return path
        n = int(np.ceil(n * ratio * 1.05)) + 1
    raise Infeasible("gesture cannot satisfy speed caps even after time dilation")


def _joint_wave_path(chain, pose, moves, duration, dt, build_wave):
    """Offset gesture on specific joints; `moves` is [(joint, scale)] pairs.

    The wave function receives u in [0, 1] and returns offsets in [-1, 1];
    amplitudes are capped to the available headroom at the anchor pose.
    """

    def build(n):
        u = np.arange(n + 1) / n
        wave = build_wave(u)
        path = np.tile(pose, (n + 1, 1))
        for joint, scale in moves:
            path[:, joint] = pose[joint] + scale * wave
        return path

    return build


def _symmetric_cap(chain, pose, joint, amplitude):
    hi_room = chain.upper_limits[joint] - pose[joint]
    lo_room = pose[joint] - chain.lower_limits[joint]
    return min(amplitude, hi_room, lo_room)


def _directional_cap(chain, pose, joint, amplitude):
    """Cap a signed amplitude to the headroom in its own direction."""
    if amplitude >= 0:
        return min(amplitude, chain.upper_limits[joint] - pose[joint])
    return -min(-amplitude, pose[joint] - chain.lower_limits[joint])


def _oscillation(chain, traj, pose, gesture_axis, params):
    joint, sign = gesture_axis
    amp = _symmetric_cap(chain, pose, joint, params["amplitude"])
    if amp < 1e-9:
        raise Infeasible(f"no headroom on joint {joint} for oscillation")
    cycles = params["cycles"]

    def wave(u):
        return sign * amp * _hann(u) * np.sin(2.0 * np.pi * cycles * u)

    build = _joint_wave_path(chain, pose, [(joint, 1.0)], params["duration"], traj.dt, wave)
    return _dilated_path(chain, traj, params["duration"], build)


def _dip(chain, traj, pose, gesture_axis, params):
    joint, sign = gesture_axis
    amp = _directional_cap(chain, pose, joint, sign * params["amplitude"])
    if abs(amp) < 1e-9:
        raise Infeasible(f"no headroom on joint {joint} for dip gesture")

    def wave(u):
        return amp * _hann(u)

    build = _joint_wave_path(chain, pose, [(joint, 1.0)], params["duration"], traj.dt, wave)
    return _dilated_path(chain, traj, params["duration"], build)


def _excursion(chain, traj, pose, target_pose, duration, go=0.35, hold=0.45):
    """Move from the anchor pose to a target pose and back, with a plateau."""
    delta = target_pose - pose

    def build(n):
        u = np.arange(n + 1) / n
        blend = _rise_hold_fall(u, go, hold)
        blend[0] = 0.0
        blend[-1] = 0.0
        return pose[None, :] + blend[:, None] * delta[None, :]

    return _dilated_path(chain, traj, duration, build)


def _multi_leg_path(chain, traj, legs, duration):
    """Piecewise blend through a list of (pose_from, pose_to, fraction) legs."""
    fractions = np.array([leg[2] for leg in legs])
    fractions = fractions / fractions.sum()
    bounds = np.concatenate([[0.0], np.cumsum(fractions)])

    def build(n):
        u = np.arange(n + 1) / n
        path = np.empty((n + 1, len(legs[0][0])))
        for i, t in enumerate(u):
            t = min(t, 1.0)
            seg = min(np.searchsorted(bounds, t, side="right") - 1, len(legs) - 1)
            a, b, _ = legs[seg]
            local = (t - bounds[seg]) / max(bounds[seg + 1] - bounds[seg], 1e-12)
            ease = 0.5 * (1.0 - np.cos(np.pi * min(max(local, 0.0), 1.0)))
            path[i] = a + ease * (b - a)
        return path

    return _dilated_path(chain, traj, duration, build)


def _reachable_point_toward(chain, seed_q, start_point, desired_point):
    """Joint target whose head lands as close to `desired_point` as feasible.

    Solves locally from `seed_q` (no restarts) so the excursion stays in the
    same configuration branch. When even the shortest candidate is out of
    reach, falls back to the best-effort strain pose if it makes visible
    progress along the desired direction.
    """
    want = desired_point - start_point
    span = float(np.linalg.norm(want))
    if span < 1e-9:
        return None
    direction = want / span
    best_q = None
    best_gain = 0.0
    for fraction in (1.0, 0.75, 0.5, 0.3, 0.15):
        candidate = start_point + fraction * want
        q, ok, _ = _solve_position(chain, candidate, None, seed_q, DEFAULT_IK_TOL, None)
        if ok:
            return q
        head = forward_kinematics(chain, q).position
        gain = float((head - start_point) @ direction)
        if gain > best_gain:
            best_gain = gain
            best_q = q
    if best_gain >= 0.005:  # visible best-effort progress
        return best_q
    return None


def _stretch_path(chain, traj, pose, params, world):
    """Press toward a target (or along the current facing) to show effort."""
    if params["target"]:
        target = _require_target(world, params["target"])
        j_pos, _, head, _ = _jacobians(chain, pose)
        direction = target - head
    else:
        j_pos, _, head, facing = _jacobians(chain, pose)
        direction = facing
    norm = np.linalg.norm(direction)
    if norm < 1e-9:
        raise Infeasible("stretch direction is degenerate")
    joint_dir = j_pos.T @ (direction / norm)
    peak = np.max(np.abs(joint_dir))
    if peak < 1e-9:
        raise Infeasible("chain cannot strain toward the stretch target")
    joint_dir = joint_dir / peak
    amp = params["amplitude"]
    cycles = params["cycles"]
    lo = chain.lower_limits
    hi = chain.upper_limits

    def build(n):
        u = np.arange(n + 1) / n
        press = _hann(u) * 0.5 * (1.0 - np.cos(2.0 * np.pi * cycles * u))
        path = pose[None, :] + (amp * press)[:, None] * joint_dir[None, :]
        path = np.clip(path, lo, hi)
        path[0] = pose
        path[-1] = pose
        return path

    path = _dilated_path(chain, traj, params["duration"], build)
    if np.max(np.abs(path - pose)) < 1e-9:
        raise Infeasible("stretch is fully blocked by joint limits")
    return path


def _speed_scale(chain, traj, factor, kind, label):
    """Time-warp the whole trajectory by a speed factor, capped at joint limits."""
    if len(traj.samples) == 1:
        return traj.copy()
    q = traj.joint_array()
    interval_speeds = np.abs(np.diff(q, axis=0)) / traj.dt
    peak = np.max(interval_speeds, axis=0)
    with np.errstate(divide="ignore"):
        allowed = np.where(peak > 0, chain.max_speeds / np.maximum(peak, 1e-12), np.inf)
    factor = min(factor, float(np.min(allowed)) * (1.0 - 1e-9))
    if abs(factor - 1.0) < 1e-12:
        return traj.copy()

    duration = traj.duration
    new_duration = duration / factor
    m = max(1, int(round(new_duration / traj.dt)))
    last = len(traj.samples) - 1
    samples = []
    for k in range(m + 1):
        if k == m:
            src = traj.samples[last]
            samples.append(State(q=src.q.copy(), tool=src.tool, world=src.world))
            continue
        pos = (k * traj.dt * factor) / traj.dt
        i0 = min(int(np.floor(pos)), last)
        i1 = min(i0 + 1, last)
        frac = pos - i0
        blended = q[i0] * (1.0 - frac) + q[i1] * frac
        nearest = traj.samples[min(int(round(pos)), last)]
        samples.append(State(q=blended, tool=nearest.tool, world=nearest.world))
    scale = 1.0 / factor
    annotations = [
        replace(a, start=a.start * scale, end=a.end * scale) for a in traj.annotations
    ]
    annotations.append(
        Annotation(start=0.0, end=(len(samples) - 1) * traj.dt, kind=kind, label=label)
    )
    return Trajectory(dt=traj.dt, samples=samples, annotations=annotations)


def _light_emphasis(traj, index, params, kind, label):
    dt = traj.dt
    last = len(traj.samples) - 1
    span_n = max(1, int(round(params["duration"] / dt)))
    floor = min(params["floor"], params["peak"])
    samples = list(traj.samples)
    changed = False
    for j in range(span_n + 1):
        i = index + j
        if i >= last:  # never touch the terminal sample
            break
        u = j / span_n
        level = floor + (params["peak"] - floor) * float(_hann(np.array([u]))[0])
        base = samples[i]
        samples[i] = State(
            q=base.q,
            tool=ToolState(
                light_on=True,
                light_intensity=min(1.0, level),
                projector_on=base.tool.projector_on,
                projected_content=base.tool.projected_content,
            ),
            world=base.world,
        )
        changed = True
    if not changed:
        return traj.copy()
    end = min(index * dt + span_n * dt, traj.duration)
    annotations = list(traj.annotations)
    annotations.append(Annotation(start=index * dt, end=end, kind=kind, label=label))
    return Trajectory(dt=dt, samples=samples, annotations=annotations)


def apply_primitive(
    chain: ChainSpec,
    traj: Trajectory,
    primitive: PrimitiveInstance,
    world: WorldState | None = None,
) -> Trajectory:
    """Apply one expressive primitive, returning a new trajectory.

    Zero-amplitude or zero-duration requests return the input unchanged.
    The terminal state (joints and tool) is always preserved exactly.
    """
    params = validate_params(primitive.kind, primitive.params)
    kind = primitive.kind
    label = primitive.label()

    if kind == "SpeedScale":
        out = _speed_scale(chain, traj, params["factor"], kind, label)
    elif kind == "PauseInsert":
        if params["duration"] < traj.dt / 2:
            return traj.copy()
        index, mode = _resolve_anchor(traj, primitive.anchor)
        pose = traj.samples[index].q
        n = max(1, int(round(params["duration"] / traj.dt)))
        path = np.tile(pose, (n + 1, 1))
        out = _insert_segment(traj, index, mode, path, kind, label)
    elif kind == "LightEmphasis":
        index, _ = _resolve_anchor(traj, primitive.anchor)
        out = _light_emphasis(traj, index, params, kind, label)
    else:
        amplitude = params.get("amplitude")
        if amplitude is not None and abs(amplitude) < 1e-12:
            return traj.copy()
        index, mode = _resolve_anchor(traj, primitive.anchor)
        pose = traj.samples[index].q

        if kind in ("Nod", "Shake", "Wag", "JerkPulse"):
            axis_name = {"Nod": "nod", "Shake": "shake", "Wag": "wag", "JerkPulse": "nod"}[kind]
            path = _oscillation(chain, traj, pose, chain.gesture_joint(axis_name), params)
        elif kind == "LowerHead":
            path = _dip(chain, traj, pose, chain.gesture_joint("nod"), params)
        elif kind == "Lean":
            joint, sign = chain.gesture_joint("lean")
            signed = dict(params)
            signed["amplitude"] = abs(params["amplitude"])
            axis = (joint, sign * (1.0 if params["amplitude"] >= 0 else -1.0))
            path = _dip(chain, traj, pose, axis, signed)
        elif kind == "Stretch":
            path = _stretch_path(chain, traj, pose, params, world)
        elif kind in ("OrientToward", "PointAwayFrom"):
            target = _require_target(world, params["target"])
            head = forward_kinematics(chain, pose).position
            aim = target if kind == "OrientToward" else head + (head - target)
            q_target = gaze_ik(chain, pose, aim)
            path = _excursion(chain, traj, pose, q_target, params["duration"], go=0.3, hold=0.45)
        elif kind == "Approach":
            target = _require_target(world, params["target"])
            head = forward_kinematics(chain, pose).position
            offset = head - target
            dist = np.linalg.norm(offset)
            direction = offset / dist if dist > 1e-9 else np.array([0.0, 0.0, 1.0])
            desired = target + params["standoff"] * direction
            q_target = _reachable_point_toward(chain, pose, head, desired)
            if q_target is None:
                raise Infeasible(f"cannot approach target {params['target']!r}")
            path = _excursion(chain, traj, pose, q_target, params["duration"], go=0.4, hold=0.2)
        elif kind == "Avoid":
            target = _require_target(world, params["target"])
            head = forward_kinematics(chain, pose).position
            away = head - target
            dist = np.linalg.norm(away)
            direction = away / dist if dist > 1e-9 else np.array([0.0, 0.0, 1.0])
            desired = head + params["distance"] * direction
            q_target = _reachable_point_toward(chain, pose, head, desired)
            if q_target is None:
                raise Infeasible(f"cannot retreat from target {params['target']!r}")
            path = _excursion(chain, traj, pose, q_target, params["duration"], go=0.4, hold=0.2)
        elif kind == "AttentionShift":
            first = _require_target(world, params["from_target"])
            second = _require_target(world, params["to_target"])
            g1 = gaze_ik(chain, pose, first)
            g2 = gaze_ik(chain, g1, second)
            legs = [
                (pose, g1, 0.28),
                (g1, g1, 0.16),
                (g1, g2, 0.24),
                (g2, g2, 0.16),
                (g2, pose, 0.16),
            ]
            path = _multi_leg_path(chain, traj, legs, params["duration"])
        else:
            raise InvalidInput(f"unknown primitive kind {kind!r}")
        out = _insert_segment(traj, index, mode, path, kind, label)

    if __debug__:
        out.validate(chain)
    # terminal-state preservation contract
    assert np.array_equal(out.samples[-1].q, traj.samples[-1].q)
    assert out.samples[-1].tool == traj.samples[-1].tool
    return out


def compose(
    chain: ChainSpec,
    traj: Trajectory,
    plan,
    world: WorldState | None = None,
) -> Trajectory:
    """Apply a sequence of primitives left to right."""
    out = traj
    for primitive in plan:
        out = apply_primitive(chain, out, primitive, world=world)
    return out


def align_to_beats(
    chain: ChainSpec,
    traj: Trajectory,
    beat_times,
    amplitude: float = 0.35,
    ramp: float = 0.4,
) -> Trajectory:
    """Superimpose a rhythmic sway whose motion extrema land on beat times.

    The oscillation phase advances exactly half a cycle between consecutive
    beats and its envelope is flat (zero slope) across the beat window, so
    each beat coincides with one extremum. The envelope's rise and fall each
    span a quarter cycle, from a zero crossing of the sway to the adjacent
    beat, which keeps the ramps monotone: they add no turning points of
    their own. `ramp` adds settle time held after the sway dies out. The
    trajectory is extended by a held pose before its terminal sample when
    the beats outrun it.
    """
    beats = [float(b) for b in (beat_times or [])]
    if not beats:
        return traj.copy()
    if any(b2 <= b1 for b1, b2 in zip(beats, beats[1:])):
        raise InvalidInput("beat_times must be strictly ascending")
    if beats[0] < 0:
        raise InvalidInput("beat_times must be non-negative")
    if amplitude < 0:
        raise InvalidInput("amplitude must be non-negative")
    if amplitude == 0:
        return traj.copy()

    out = traj.copy()
    dt = out.dt
    gap = (beats[1] - beats[0]) if len(beats) > 1 else max(ramp, 2 * dt)
    last_gap = (beats[-1] - beats[-2]) if len(beats) > 1 else max(ramp, 2 * dt)
    fall_span = last_gap / 2
    needed = beats[-1] + fall_span + ramp + 2 * dt
    if needed > out.duration:
        extra = int(np.ceil((needed - out.duration) / dt))
        last = len(out.samples) - 1
        pose = np.tile(out.samples[last].q, (extra + 1, 1))
        out = _insert_segment(out, last, "before_terminal", pose, "PauseInsert", "beat-extension")
        out.annotations.pop()  # the extension is part of the dance span below

    times = out.times()
    first, final = beats[0], beats[-1]
    phase_knots = np.pi / 2 + np.pi * np.arange(len(beats))
    phase = np.interp(times, beats, phase_knots)
    before = times < first
    phase[before] = phase_knots[0] - (first - times[before]) * (np.pi / gap)
    after = times > final
    phase[after] = phase_knots[-1] + (times[after] - final) * (np.pi / last_gap)

    envelope = np.zeros_like(times)
    rise_start = max(0.0, first - gap / 2)
    rise_span = max(first - rise_start, dt)
    rising = (times >= rise_start) & (times < first)
    envelope[rising] = 0.5 * (1.0 - np.cos(np.pi * (times[rising] - rise_start) / rise_span))
    envelope[(times >= first) & (times <= final)] = 1.0
    falling = (times > final) & (times <= final + fall_span)
    envelope[falling] = 0.5 * (1.0 + np.cos(np.pi * (times[falling] - final) / fall_span))

    wave = envelope * np.sin(phase)
    axes = chain.dance_axes()
    q = out.joint_array()
    lo = chain.lower_limits
    hi = chain.upper_limits

    # cap the amplitude so offsets respect limits and speed caps everywhere
    amp = amplitude
    active = envelope > 0
    active[-1] = False
    for joint, scale in axes:
        base = q[active, joint]
        if base.size == 0:
            continue
        room = min(float(np.min(hi[joint] - base)), float(np.min(base - lo[joint])))
        amp = min(amp, room / abs(scale) if scale else amp)
    offsets = np.zeros_like(q)
    for joint, scale in axes:
        offsets[:, joint] = amp * scale * wave
    offsets[-1] = 0.0
    # scale each joint's sway uniformly in time so extrema stay on the beats;
    # a joint whose base motion saturates its speed cap simply stops dancing
    off_speed = np.abs(np.diff(offsets, axis=0)) / dt
    base_speed = np.abs(np.diff(q, axis=0)) / dt
    margin = chain.max_speeds[None, :] * (1.0 - 1e-9) - base_speed
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(off_speed > 1e-12, margin / off_speed, np.inf)
    joint_scale = np.clip(np.min(ratios, axis=0), 0.0, 1.0)
    offsets *= joint_scale[None, :]

    new_q = np.clip(q + offsets, lo, hi)
    samples = [
        State(q=new_q[i], tool=s.tool, world=s.world) for i, s in enumerate(out.samples)
    ]
    samples[-1] = out.samples[-1]
    annotations = list(out.annotations)
    annotations.append(
        Annotation(
            start=rise_start,
            end=min(final + fall_span, (len(samples) - 1) * dt),
            kind="AlignToBeats",
            label=f"{len(beats)} beats",
        )
    )
    result = Trajectory(dt=dt, samples=samples, annotations=annotations)
    if __debug__:
        result.validate(chain)
    assert np.array_equal(result.samples[-1].q, traj.samples[-1].q)
    assert result.samples[-1].tool == traj.samples[-1].tool
    return result

"""Trajectory data model, interpolation, resampling, and kinematic features.

A trajectory is a uniformly sampled sequence of states (joint vector, tool
state, world snapshot) plus annotations marking which expressive gesture
produced which time span.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInput
from .kinematics import ChainSpec, batch_head_poses, within_limits

DEFAULT_DT = 0.02  # seconds per sample
RAMP_TIME = 0.25   # seconds to reach a joint's peak speed
PAUSE_SPEED = 0.01        # m/s head speed below which the robot is paused
PAUSE_MIN_DURATION = 0.2  # s; shorter still spans are not reported as pauses
_SPEED_TOL = 1e-9


@dataclass(frozen=True)
class ToolState:
    """Lamp head tool flags: light and projector."""

    light_on: bool = False
    light_intensity: float = 0.0
    projector_on: bool = False
    projected_content: str | None = None

    def validate(self) -> None:
        if not 0.0 <= self.light_intensity <= 1.0:
            raise InvalidInput(f"light_intensity {self.light_intensity} outside [0, 1]")
        if self.projected_content is not None and not self.projector_on:
            raise InvalidInput("projected_content requires projector_on")


@dataclass
class WorldState:
    """Static scene snapshot: the user, named objects, and music beat times."""

    user_position: np.ndarray
    user_attention_point: np.ndarray | None = None
    objects: dict = field(default_factory=dict)
    beat_times: list = field(default_factory=list)

    def validate(self) -> None:
        if np.asarray(self.user_position, dtype=float).shape != (3,):
            raise InvalidInput("user_position must be a 3-vector")
        beats = list(self.beat_times or [])
        if any(b2 <= b1 for b1, b2 in zip(beats, beats[1:])):
            raise InvalidInput("beat_times must be strictly ascending")

    def target_position(self, name: str):
        """World position for a named target ('user' or an object name)."""
        if name == "user":
            return np.asarray(self.user_position, dtype=float)
        if name in self.objects:
            return np.asarray(self.objects[name], dtype=float)
        return None


@dataclass
class State:
    q: np.ndarray
    tool: ToolState = ToolState()
    world: WorldState | None = None


@dataclass(frozen=True)
class Annotation:
    """Time span a primitive occupies in the final trajectory."""

    start: float
    end: float
    kind: str
    label: str = ""


@dataclass
class Trajectory:
    dt: float
    samples: list
    annotations: list = field(default_factory=list)

    @property
    def duration(self) -> float:
        return (len(self.samples) - 1) * self.dt

    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dt

    def joint_array(self) -> np.ndarray:
        return np.stack([s.q for s in self.samples])

    def terminal(self) -> State:
        return self.samples[-1]

    def copy(self) -> "Trajectory":
        samples = [State(q=s.q.copy(), tool=s.tool, world=s.world) for s in self.samples]
        return Trajectory(dt=self.dt, samples=samples, annotations=list(self.annotations))

    def validate(self, chain: ChainSpec) -> None:
        if self.dt <= 0:
            raise InvalidInput("dt must be positive")
        if not self.samples:
            raise InvalidInput("trajectory must have at least one sample")
        limit_cap = chain.max_speeds * (1 + _SPEED_TOL) + _SPEED_TOL
        prev = None
        for s in self.samples:
            if s.q.shape != (chain.dof,) or not np.all(np.isfinite(s.q)):
                raise InvalidInput("sample joint vector malformed")
            if not within_limits(chain, s.q):
                raise InvalidInput("sample outside joint limits")
            s.tool.validate()
            if prev is not None:
                speed = np.abs(s.q - prev.q) / self.dt
                if np.any(speed > limit_cap):
                    worst = int(np.argmax(speed - limit_cap))
                    raise InvalidInput(
                        f"joint {worst} exceeds speed cap: {speed[worst]:.4f} rad/s"
                    )
            prev = s
        for a in self.annotations:
            if not (0.0 <= a.start <= a.end <= self.duration + self.dt):
                raise InvalidInput(f"annotation {a.kind!r} span outside trajectory")


def _trapezoid_progress(total_time: float, peak: float, accel: float, t: np.ndarray) -> np.ndarray:
    """Normalized distance covered at times t for a trapezoidal speed profile."""
    ramp = peak / accel
    s = np.empty_like(t)
    rising = t < ramp
    falling = t > total_time - ramp
    cruise = ~rising & ~falling
    s[rising] = 0.5 * accel * t[rising] ** 2
    s[cruise] = 0.5 * accel * ramp ** 2 + peak * (t[cruise] - ramp)
    remain = np.maximum(total_time - t[falling], 0.0)
    s[falling] = 1.0 - 0.5 * accel * remain ** 2
    return np.clip(s, 0.0, 1.0)


def interpolate(
    chain: ChainSpec,
    q_start,
    q_goal,
    dt: float = DEFAULT_DT,
    speed_scale: float = 1.0,
    tool: ToolState = ToolState(),
    world: WorldState | None = None,
) -> Trajectory:
    """Straight-line joint-space move with a trapezoidal speed profile.

    All joints share one time-scaling, so each joint progresses monotonically
    and the slowest joint sets the duration. The first sample is exactly
    q_start and the last exactly q_goal.
    """
    if dt <= 0:
        raise InvalidInput("dt must be positive")
    if not 0.0 < speed_scale <= 1.0:
        raise InvalidInput("speed_scale must be in (0, 1]")
    q_start = np.asarray(q_start, dtype=float)
    q_goal = np.asarray(q_goal, dtype=float)
    if not (within_limits(chain, q_start) and within_limits(chain, q_goal)):
        raise InvalidInput("endpoints must lie within joint limits")

    delta = q_goal - q_start
    moving = np.abs(delta) > 0.0
    if not np.any(moving):
        return Trajectory(dt=dt, samples=[State(q=q_start.copy(), tool=tool, world=world)])

    speeds = chain.max_speeds * speed_scale
    accels = chain.max_speeds / RAMP_TIME
    peak = float(np.min(speeds[moving] / np.abs(delta[moving])))
    accel = float(np.min(accels[moving] / np.abs(delta[moving])))

    ramp_dist = peak ** 2 / (2.0 * accel)
    if 2.0 * ramp_dist <= 1.0:
        total = 1.0 / peak + peak / accel
    else:
        peak = float(np.sqrt(accel))
        total = 2.0 / peak

    n = max(1, int(np.ceil(total / dt - 1e-9)))
    t = np.arange(n + 1) * dt
    s = _trapezoid_progress(total, peak, accel, np.minimum(t, total))
    samples = []
    for k in range(n + 1):
        q = q_goal.copy() if k == n else q_start + s[k] * delta
        samples.append(State(q=q, tool=tool, world=world))
    traj = Trajectory(dt=dt, samples=samples)
    if __debug__:
        traj.validate(chain)
    return traj


def resample(traj: Trajectory, new_dt: float) -> Trajectory:
    """Re-time a trajectory to a new sample period.

    Joint vectors are linearly interpolated; tool and world snapshots snap to
    the nearest original sample; both endpoints are preserved exactly.
    """
    if new_dt <= 0:
        raise InvalidInput("new_dt must be positive")
    if new_dt == traj.dt or len(traj.samples) == 1:
        out = traj.copy()
        out.dt = new_dt
        return out

    duration = traj.duration
    m = max(1, int(round(duration / new_dt)))
    q_old = traj.joint_array()
    last = len(traj.samples) - 1
    samples = []
    for k in range(m + 1):
        if k == m:
            src = traj.samples[last]
            samples.append(State(q=src.q.copy(), tool=src.tool, world=src.world))
            continue
        pos = (k * new_dt) / traj.dt
        i0 = min(int(np.floor(pos)), last)
        i1 = min(i0 + 1, last)
        frac = pos - i0
        q = q_old[i0] * (1.0 - frac) + q_old[i1] * frac
        nearest = traj.samples[min(int(round(pos)), last)]
        samples.append(State(q=q, tool=nearest.tool, world=nearest.world))
    annotations = [
        replace(a, start=min(a.start, m * new_dt), end=min(a.end, m * new_dt))
        for a in traj.annotations
    ]
    return Trajectory(dt=new_dt, samples=samples, annotations=annotations)


@dataclass
class FeatureSeries:
    """Per-sample head kinematics plus detected stillness spans."""

    times: np.ndarray
    positions: np.ndarray
    facings: np.ndarray
    speed: np.ndarray
    acceleration: np.ndarray
    jerk: np.ndarray
    pauses: list  # (start time, duration) pairs


def kinematic_features(chain: ChainSpec, traj: Trajectory) -> FeatureSeries:
    """Head pose series with speed/acceleration/jerk and pause spans.

    Derivatives use central finite differences (one-sided at the ends).
    Pauses are maximal spans with head speed below PAUSE_SPEED lasting at
    least PAUSE_MIN_DURATION.
    """
    q = traj.joint_array()
    positions, facings = batch_head_poses(chain, q)
    n = len(traj.samples)
    times = traj.times()
    if n == 1:
        zero = np.zeros(1)
        return FeatureSeries(times, positions, facings, zero, zero.copy(), zero.copy(), [])

    velocity = np.gradient(positions, traj.dt, axis=0)
    speed = np.linalg.norm(velocity, axis=1)
    accel_vec = np.gradient(velocity, traj.dt, axis=0)
    acceleration = np.linalg.norm(accel_vec, axis=1)
    jerk_vec = np.gradient(accel_vec, traj.dt, axis=0)
    jerk = np.linalg.norm(jerk_vec, axis=1)

    pauses = []
    run_start = None
    for i in range(n + 1):
        still = i < n and speed[i] < PAUSE_SPEED
        if still and run_start is None:
            run_start = i
        elif not still and run_start is not None:
            span = (i - 1 - run_start) * traj.dt
            if span >= PAUSE_MIN_DURATION - 1e-9:
                pauses.append((times[run_start], span))
            run_start = None
    return FeatureSeries(times, positions, facings, speed, acceleration, jerk, pauses)

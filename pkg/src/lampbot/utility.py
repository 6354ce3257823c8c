"""Trajectory scoring: task completion plus expressive quality.

Functional utility counts samples dwelling at the goal state. Expressive
utility aggregates four movement-quality categories:

- attention: time integral of how directly the head faces a named target
- intention: pre-movement gaze toward the goal (telegraphing the next move)
- attitude: how closely pausing/jerk/speed match a target character profile
- emotion: how closely movement amplitude/tempo match a target profile

Category scores are normalized to [0, 1]; the expressive total is the
weighted sum, with the attention term weighted by trajectory time so longer
deliberate gazes score higher than glances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, TargetMissing
from .kinematics import ChainSpec, batch_head_poses, forward_kinematics
from .trajectory import (
    PAUSE_MIN_DURATION,
    PAUSE_SPEED,
    FeatureSeries,
    Trajectory,
    WorldState,
    kinematic_features,
)

_trapezoid = getattr(np, "trapezoid", np.trapz)

CATEGORIES = ("intention", "attention", "attitude", "emotion")

# Normalization constants mapping raw kinematic measurements onto [0, 1].
# Chosen for desk-scale motion; documented in the README format notes.
SPEED_NORM = 0.5    # m/s mean head speed at level 1.0
JERK_NORM = 80.0    # m/s^3 RMS head jerk at level 1.0
AMPLITUDE_NORM = 0.12  # m RMS positional deviation at level 1.0
TEMPO_NORM = 2.0    # speed peaks per second at level 1.0
_PEAK_SPEED_FLOOR = 0.05  # m/s; slower wiggles do not count as tempo peaks


@dataclass(frozen=True)
class AttitudeProfile:
    """Target manner-of-motion profile, all entries in [0, 1]."""

    pause_fraction: float = 0.0
    jerk_level: float = 0.0
    speed_level: float = 0.5

    def as_tuple(self):
        return (self.pause_fraction, self.jerk_level, self.speed_level)


@dataclass(frozen=True)
class EmotionProfile:
    """Target energy profile: movement extent and rhythm, in [0, 1]."""

    amplitude: float = 0.0
    tempo: float = 0.0

    def as_tuple(self):
        return (self.amplitude, self.tempo)


@dataclass(frozen=True)
class ExpressionSpec:
    """Weights and targets describing what to express and how much."""

    weights: dict = field(default_factory=dict)  # category -> weight >= 0
    attention_target: str | None = None
    intention_window: float = 0.5  # seconds of lookback before motion onset
    attitude_profile: AttitudeProfile | None = None
    emotion_profile: EmotionProfile | None = None

    def validate(self) -> None:
        for name, value in self.weights.items():
            if name not in CATEGORIES:
                raise InvalidInput(f"unknown expression category {name!r}")
            if value < 0:
                raise InvalidInput(f"weight for {name!r} must be non-negative")
        if self.intention_window <= 0:
            raise InvalidInput("intention_window must be positive")

    def weight(self, category: str) -> float:
        return float(self.weights.get(category, 0.0))


@dataclass(frozen=True)
class UtilityReport:
    """Scored trajectory: functional count, expressive sum, and breakdown."""

    F: float
    E: float
    per_category: dict
    scores: dict            # raw [0, 1] category scores before weighting
    gamma: float
    total: float


def _tool_matches(tool, goal_tool) -> bool:
    return (
        tool.light_on == goal_tool.light_on
        and tool.projector_on == goal_tool.projector_on
        and tool.projected_content == goal_tool.projected_content
        and abs(tool.light_intensity - goal_tool.light_intensity) <= 1e-6
    )


def functional_utility(traj: Trajectory, task) -> float:
    """Number of samples dwelling at the goal state.

    A sample counts when every joint is within task.epsilon of the goal joint
    vector and the tool state matches the goal tool. Tasks whose goal could
    not be resolved to a joint vector (out-of-reach goals) score 0.
    """
    goal_q = task.goal_joints()
    if goal_q is None:
        return 0.0
    eps = task.epsilon
    count = 0
    for s in traj.samples:
        if np.max(np.abs(s.q - goal_q)) <= eps and _tool_matches(s.tool, task.goal_tool):
            count += 1
    return float(count)


def attention_values(chain: ChainSpec, traj: Trajectory, target_point) -> np.ndarray:
    """Per-sample attention toward a world point: (1 + cos angle) / 2."""
    positions, facings = batch_head_poses(chain, traj.joint_array())
    to_target = np.asarray(target_point, dtype=float) - positions
    dist = np.linalg.norm(to_target, axis=1)
    safe = np.maximum(dist, 1e-9)
    cosine = np.einsum("ij,ij->i", facings, to_target / safe[:, None])
    values = 0.5 * (1.0 + np.clip(cosine, -1.0, 1.0))
    values[dist < 1e-9] = 0.5  # head at the target: direction undefined
    return values


def attention_score(chain: ChainSpec, q, target_point) -> float:
    """Attention for a single joint vector."""
    pose = forward_kinematics(chain, np.asarray(q, dtype=float))
    to_target = np.asarray(target_point, dtype=float) - pose.position
    dist = float(np.linalg.norm(to_target))
    if dist < 1e-9:
        return 0.5
    cosine = float(pose.facing @ (to_target / dist))
    return 0.5 * (1.0 + max(-1.0, min(1.0, cosine)))


def motion_onset(traj: Trajectory, features: FeatureSeries) -> float:
    """Time of the first above-pause-speed sample outside any gesture span.

    Gesture spans are skipped so that an inserted pre-movement gaze does not
    itself count as the start of the task motion. Returns the trajectory
    duration when nothing qualifies (the robot never travels).
    """
    for i, t in enumerate(features.times):
        if features.speed[i] <= PAUSE_SPEED:
            continue
        inside = any(a.start - 1e-9 <= t <= a.end + 1e-9 for a in traj.annotations)
        if not inside:
            return float(t)
    return float(traj.duration)


def intention_score(
    chain: ChainSpec,
    traj: Trajectory,
    target_point,
    window: float = 0.5,
    features: FeatureSeries | None = None,
) -> float:
    """Pre-movement gaze score toward a target point, in [0, 1].

    Looks back `window` seconds from the motion onset and averages attention
    over the still samples found there. A qualifying pre-gaze must hold still
    for at least the pause threshold duration; otherwise the score is 0.
    """
    if window <= 0:
        raise InvalidInput("window must be positive")
    if features is None:
        features = kinematic_features(chain, traj)
    onset = motion_onset(traj, features)
    if onset <= 0.0:
        return 0.0
    mask = (
        (features.times >= onset - window)
        & (features.times < onset)
        & (features.speed < PAUSE_SPEED)
    )
    count = int(np.count_nonzero(mask))
    if count * traj.dt < PAUSE_MIN_DURATION - 1e-9:
        return 0.0
    att = attention_values(chain, traj, target_point)
    return float(np.mean(att[mask]))


def _observed_profiles(features: FeatureSeries, duration: float, dt: float):
    """Raw attitude/emotion measurements normalized onto [0, 1]."""
    if duration <= 0.0:
        return (1.0, 0.0, 0.0), (0.0, 0.0)
    pause_total = sum(span for _, span in features.pauses)
    pause_fraction = min(1.0, pause_total / duration)
    speed_level = min(1.0, float(np.mean(features.speed)) / SPEED_NORM)
    jerk_level = min(1.0, float(np.sqrt(np.mean(features.jerk ** 2))) / JERK_NORM)

    centroid = features.positions.mean(axis=0)
    spread = float(np.sqrt(np.mean(np.sum((features.positions - centroid) ** 2, axis=1))))
    amplitude = min(1.0, spread / AMPLITUDE_NORM)
    speed = features.speed
    peaks = 0
    for i in range(1, len(speed) - 1):
        if speed[i] >= _PEAK_SPEED_FLOOR and speed[i] >= speed[i - 1] and speed[i] > speed[i + 1]:
            peaks += 1
    tempo = min(1.0, (peaks / duration) / TEMPO_NORM)
    return (pause_fraction, jerk_level, speed_level), (amplitude, tempo)


def attitude_emotion_score(
    chain: ChainSpec,
    traj: Trajectory,
    attitude_profile: AttitudeProfile | None,
    emotion_profile: EmotionProfile | None,
    features: FeatureSeries | None = None,
) -> tuple[float, float]:
    """Match scores in [0, 1] against target manner and energy profiles.

    1.0 means the observed profile equals the target exactly; a maximally
    opposite profile scores 0.0. Absent profiles score 0.
    """
    if features is None:
        features = kinematic_features(chain, traj)
    observed_attitude, observed_emotion = _observed_profiles(features, traj.duration, traj.dt)
    attitude = 0.0
    if attitude_profile is not None:
        target = attitude_profile.as_tuple()
        attitude = 1.0 - float(np.mean([abs(o - t) for o, t in zip(observed_attitude, target)]))
    emotion = 0.0
    if emotion_profile is not None:
        target = emotion_profile.as_tuple()
        emotion = 1.0 - float(np.mean([abs(o - t) for o, t in zip(observed_emotion, target)]))
    return attitude, emotion


def expressive_utility(
    chain: ChainSpec,
    traj: Trajectory,
    world: WorldState | None,
    spec: ExpressionSpec | None,
    goal_point=None,
) -> tuple[float, dict, dict]:
    """Expressive total E plus weighted contributions and raw scores.

    The attention contribution is the time integral of per-sample attention
    (trapezoid rule), so E scales with how long the robot attends; the other
    three categories contribute their [0, 1] score directly.
    """
    per_category = {name: 0.0 for name in CATEGORIES}
    scores = {name: 0.0 for name in CATEGORIES}
    if spec is None:
        return 0.0, per_category, scores
    spec.validate()

    features = kinematic_features(chain, traj)

    target_point = None
    if spec.attention_target is not None:
        if world is None:
            raise TargetMissing("attention target given but no world provided")
        target_point = world.target_position(spec.attention_target)
        if target_point is None:
            raise TargetMissing(f"world has no target named {spec.attention_target!r}")

    if target_point is not None:
        att = attention_values(chain, traj, target_point)
        scores["attention"] = float(np.mean(att))
        integral = float(_trapezoid(att, dx=traj.dt)) if len(att) > 1 else 0.0
        per_category["attention"] = spec.weight("attention") * integral

    if goal_point is not None:
        scores["intention"] = intention_score(
            chain, traj, goal_point, spec.intention_window, features=features
        )
        per_category["intention"] = spec.weight("intention") * scores["intention"]

    attitude, emotion = attitude_emotion_score(
        chain, traj, spec.attitude_profile, spec.emotion_profile, features=features
    )
    scores["attitude"] = attitude
    scores["emotion"] = emotion
    per_category["attitude"] = spec.weight("attitude") * attitude
    per_category["emotion"] = spec.weight("emotion") * emotion

    E = float(sum(per_category.values()))
    return E, per_category, scores


def total_utility(
    chain: ChainSpec,
    traj: Trajectory,
    task,
    spec: ExpressionSpec | None,
    gamma: float,
) -> UtilityReport:
    """Score a trajectory for a task: total = F + gamma * E."""
    if gamma < 0:
        raise InvalidInput("gamma must be non-negative")
    if not math.isfinite(gamma):
        raise InvalidInput("gamma must be finite")
    F = functional_utility(traj, task)
    E, per_category, scores = expressive_utility(
        chain, traj, task.world, spec, goal_point=task.goal_point(chain)
    )
    return UtilityReport(
        F=F,
        E=E,
        per_category=per_category,
        scores=scores,
        gamma=gamma,
        total=F + gamma * E,
    )

"""Built-in task scenarios and the functional/expressive pair builder.

Each scenario bundles a world, a start pose, a goal (pose and tool event),
an expression profile saying what qualities matter, and a hand-scripted
gesture plan. Pairs are built two ways: `scripted` plays the stored plan,
`searched` lets the planner pick one. Both share the same functional base,
so the two variants always end in the same terminal state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, InvalidInput, UnknownScenario, Unreachable
from .kinematics import ChainSpec, default_chain, forward_kinematics, inverse_kinematics
from .planner import PlannerConfig, ScoredPlan, plan_expressive, plan_functional
from .primitives import PrimitiveInstance, align_to_beats, compose, validate_params
from .serialize import (
    SCENARIO_FORMAT,
    check_version,
    load_json,
    tool_from_dict,
    world_from_dict,
)
from .trajectory import ToolState, Trajectory, WorldState
from .utility import (
    AttitudeProfile,
    EmotionProfile,
    ExpressionSpec,
    UtilityReport,
    total_utility,
)

GOAL_KINDS = ("point", "joints", "start")
UNREACHABLE_POLICIES = ("raise", "best_effort")
ORIENTATIONS = ("function", "social")
AGENCIES = ("proactive", "reactive")


@dataclass
class TaskSpec:
    """A planning task bound to a kinematic chain."""

    id: str
    title: str
    orientation: str
    agency: str
    description: str
    chain: ChainSpec
    world: WorldState
    start_joints: np.ndarray
    goal_kind: str
    goal_tool: ToolState
    cruise_tool: ToolState = field(default_factory=ToolState)
    goal_point_raw: np.ndarray | None = None
    goal_joints_raw: np.ndarray | None = None
    epsilon: float = 0.05
    on_unreachable: str = "raise"
    expression: ExpressionSpec | None = None
    scripted_plan: tuple = ()
    beat_align: dict | None = None

    def __post_init__(self):
        self._resolved = False
        self._goal_q = None
        self._travel_q = None
        self.validate()

    def validate(self) -> None:
        if self.orientation not in ORIENTATIONS:
            raise InvalidConfig(f"orientation must be one of {ORIENTATIONS}")
        if self.agency not in AGENCIES:
            raise InvalidConfig(f"agency must be one of {AGENCIES}")
        if self.goal_kind not in GOAL_KINDS:
            raise InvalidConfig(f"goal kind must be one of {GOAL_KINDS}")
        if self.on_unreachable not in UNREACHABLE_POLICIES:
            raise InvalidConfig(f"on_unreachable must be one of {UNREACHABLE_POLICIES}")
        if self.epsilon <= 0:
            raise InvalidConfig("epsilon must be positive")
        if self.goal_kind == "point" and self.goal_point_raw is None:
            raise InvalidConfig("point goal needs a goal point")
        if self.goal_kind == "joints" and self.goal_joints_raw is None:
            raise InvalidConfig("joints goal needs goal joints")
        start = np.asarray(self.start_joints, dtype=float)
        if start.shape != (self.chain.dof,):
            raise InvalidConfig("start joints must match the chain's joint count")
        if self.expression is not None:
            self.expression.validate()
        for step in self.scripted_plan:
            validate_params(step.kind, step.params)

    def _resolve(self) -> None:
        if self._resolved:
            return
        if self.goal_kind == "start":
            q = np.asarray(self.start_joints, dtype=float).copy()
        elif self.goal_kind == "joints":
            q = np.asarray(self.goal_joints_raw, dtype=float).copy()
            if not np.all(q >= self.chain.lower_limits) or not np.all(q <= self.chain.upper_limits):
                raise InvalidConfig("goal joints violate joint limits")
        else:
            try:
                q = inverse_kinematics(self.chain, self.goal_point_raw, self.start_joints)
            except Unreachable as exc:
                if self.on_unreachable == "raise":
                    raise
                self._goal_q = None
                self._travel_q = np.asarray(exc.best_q, dtype=float)
                self._resolved = True
                return
        self._goal_q = q
        self._travel_q = q
        self._resolved = True

    def goal_joints(self):
        """Joint vector that completes the task, or None when out of reach."""
        self._resolve()
        return None if self._goal_q is None else self._goal_q.copy()

    def travel_joints(self, chain: ChainSpec):
        """Where the base trajectory should drive: the goal pose, or the
        nearest-reach strain pose under the best-effort policy."""
        self._resolve()
        return self._travel_q.copy()

    def goal_point(self, chain: ChainSpec):
        """Task-space goal position, used for pre-movement gaze scoring."""
        if self.goal_kind == "point":
            return np.asarray(self.goal_point_raw, dtype=float).copy()
        self._resolve()
        q = self._travel_q if self._goal_q is None else self._goal_q
        return forward_kinematics(chain, q).position

    def gaze_targets(self) -> list:
        return ["user"] + sorted(self.world.objects)

    def reachable_goal(self) -> bool:
        self._resolve()
        return self._goal_q is not None


@dataclass(frozen=True)
class PlanPair:
    """A functional baseline and its expressive counterpart."""

    task: TaskSpec
    gamma: float
    mode: str
    functional: Trajectory
    expressive: Trajectory
    plan: tuple
    functional_report: UtilityReport
    expressive_report: UtilityReport


def _profile_from(doc, cls):
    if doc is None:
        return None
    return cls(**{k: float(v) for k, v in doc.items()})


def _expression_from(doc) -> ExpressionSpec | None:
    if doc is None:
        return None
    spec = ExpressionSpec(
        weights={str(k): float(v) for k, v in dict(doc.get("weights", {})).items()},
        attention_target=doc.get("attention_target"),
        intention_window=float(doc.get("intention_window", 0.5)),
        attitude_profile=_profile_from(doc.get("attitude_profile"), AttitudeProfile),
        emotion_profile=_profile_from(doc.get("emotion_profile"), EmotionProfile),
    )
    spec.validate()
    return spec


def _plan_from(rows) -> tuple:
    plan = []
    for row in rows or []:
        anchor = row.get("anchor", "mid")
        if isinstance(anchor, (int, float)) and not isinstance(anchor, bool):
            anchor = float(anchor)
        plan.append(
            PrimitiveInstance(
                kind=str(row["kind"]),
                params=dict(row.get("params", {})),
                anchor=anchor,
            )
        )
    return tuple(plan)


def task_from_dict(doc: dict, chain: ChainSpec | None = None) -> TaskSpec:
    check_version(doc, SCENARIO_FORMAT)
    chain = chain or default_chain()
    goal = doc.get("goal", {})
    point = goal.get("point")
    joints = goal.get("joints")
    return TaskSpec(
        id=str(doc["id"]),
        title=str(doc.get("title", doc["id"])),
        orientation=str(doc["orientation"]),
        agency=str(doc["agency"]),
        description=str(doc.get("description", "")),
        chain=chain,
        world=world_from_dict(doc.get("world", {})),
        start_joints=np.asarray(doc["start_joints"], dtype=float),
        goal_kind=str(goal.get("kind", "point")),
        goal_tool=tool_from_dict(goal.get("tool", {})),
        cruise_tool=tool_from_dict(doc.get("cruise_tool", {})),
        goal_point_raw=None if point is None else np.asarray(point, dtype=float),
        goal_joints_raw=None if joints is None else np.asarray(joints, dtype=float),
        epsilon=float(doc.get("epsilon", 0.05)),
        on_unreachable=str(doc.get("on_unreachable", "raise")),
        expression=_expression_from(doc.get("expression")),
        scripted_plan=_plan_from(doc.get("scripted_plan")),
        beat_align=doc.get("beat_align"),
    )


def _scenario_dir():
    return resources.files("lampbot").joinpath("data", "scenarios")


def list_scenarios() -> list:
    return sorted(p.name[: -len(".json")] for p in _scenario_dir().iterdir() if p.name.endswith(".json"))


def load_scenario(name_or_path, chain: ChainSpec | None = None) -> TaskSpec:
    """Load a scenario by built-in id or by path to a scenario JSON file."""
    path = Path(str(name_or_path))
    if path.suffix == ".json" and path.exists():
        return task_from_dict(load_json(path), chain)
    entry = _scenario_dir().joinpath(f"{name_or_path}.json")
    if not entry.is_file():
        raise UnknownScenario(
            f"unknown scenario {name_or_path!r}; available: {', '.join(list_scenarios())}"
        )
    import json as _json

    return task_from_dict(_json.loads(entry.read_text()), chain)


def build_pair(
    chain: ChainSpec,
    task: TaskSpec,
    gamma: float,
    mode: str = "scripted",
    config: PlannerConfig | None = None,
) -> PlanPair:
    """Build the functional trajectory and its expressive variant.

    `scripted` composes the scenario's stored plan; `searched` runs the
    expressive planner. A beat alignment pass, when the scenario asks for
    one, is applied after the plan in either mode.
    """
    if mode not in ("scripted", "searched"):
        raise InvalidInput("mode must be 'scripted' or 'searched'")
    config = config or PlannerConfig()
    functional = plan_functional(chain, task, config)

    if mode == "scripted":
        plan = task.scripted_plan
        expressive = compose(chain, functional, plan, world=task.world)
    else:
        scored = plan_expressive(chain, task, task.expression, gamma, config)
        plan = scored.plan
        expressive = scored.trajectory

    if task.beat_align:
        expressive = align_to_beats(
            chain,
            expressive,
            task.world.beat_times,
            amplitude=float(task.beat_align.get("amplitude", 0.35)),
            ramp=float(task.beat_align.get("ramp", 0.4)),
        )

    functional_report = total_utility(chain, functional, task, task.expression, gamma)
    expressive_report = total_utility(chain, expressive, task, task.expression, gamma)
    return PlanPair(
        task=task,
        gamma=gamma,
        mode=mode,
        functional=functional,
        expressive=expressive,
        plan=tuple(plan),
        functional_report=functional_report,
        expressive_report=expressive_report,
    )

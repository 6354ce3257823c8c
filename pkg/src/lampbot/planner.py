"""Planning: a task-completing base trajectory plus expressive search on top.

The functional planner produces the shortest smooth move to the task goal,
firing the goal tool event on one final appended sample. The expressive
planner searches sequences of expressive primitives layered onto that base,
maximizing task utility plus gamma times expressive utility. Candidates
that would change the task outcome are discarded outright, so expression
never trades away completion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible, InvalidInput, TargetMissing, Unreachable
from .kinematics import ChainSpec
from .primitives import PrimitiveInstance, apply_primitive
from .trajectory import State, Trajectory, interpolate
from .utility import ExpressionSpec, UtilityReport, expressive_utility, functional_utility

PLAN_MODES = ("beam", "exhaustive")


@dataclass(frozen=True)
class PlannerConfig:
    """Search parameters. Defaults favor quick, deterministic planning."""

    mode: str = "beam"
    beam_width: int = 3
    max_plan_length: int = 2
    max_candidates: int = 20000
    speed_scale: float = 0.8
    dt: float = 0.02
    seed: int = 0

    def validate(self) -> None:
        if self.mode not in PLAN_MODES:
            raise InvalidInput(f"mode must be one of {PLAN_MODES}")
        if self.beam_width < 1:
            raise InvalidInput("beam_width must be at least 1")
        if not 0 <= self.max_plan_length <= 4:
            raise InvalidInput("max_plan_length must be 0 to 4")
        if self.max_candidates < 1:
            raise InvalidInput("max_candidates must be positive")
        if not 0 < self.speed_scale <= 1.0:
            raise InvalidInput("speed_scale must be in (0, 1]")
        if self.dt <= 0:
            raise InvalidInput("dt must be positive")


@dataclass(frozen=True)
class ScoredPlan:
    """One evaluated candidate: the primitive sequence and its utilities."""

    plan: tuple
    trajectory: Trajectory
    F: float
    E: float
    per_category: dict
    scores: dict
    duration: float
    index: tuple  # catalog indices, lexicographic tie-break key

    def total(self, gamma: float) -> float:
        return self.F + gamma * self.E

    def report(self, gamma: float) -> UtilityReport:
        return UtilityReport(
            F=self.F,
            E=self.E,
            per_category=dict(self.per_category),
            scores=dict(self.scores),
            gamma=gamma,
            total=self.total(gamma),
        )


def plan_functional(chain: ChainSpec, task, config: PlannerConfig | None = None) -> Trajectory:
    """Shortest smooth trajectory completing the task.

    Travels from the start pose to the goal pose under the cruise tool
    state, then appends one final sample switching to the goal tool state.
    Out-of-reach goals either raise or fall back to the nearest reachable
    strain pose, according to the task's unreachable policy; the tool event
    still fires so the outcome is visible either way.
    """
    config = config or PlannerConfig()
    config.validate()
    q_travel = task.travel_joints(chain)
    base = interpolate(
        chain,
        task.start_joints,
        q_travel,
        dt=config.dt,
        speed_scale=config.speed_scale,
        tool=task.cruise_tool,
        world=task.world,
    )
    samples = base.samples + [State(q=q_travel.copy(), tool=task.goal_tool, world=task.world)]
    traj = Trajectory(dt=base.dt, samples=samples, annotations=[])
    if __debug__:
        traj.validate(chain)
    return traj


def build_step_catalog(task, config: PlannerConfig | None = None) -> list:
    """Deterministic menu of candidate gesture steps for this task's world."""
    targets = task.gaze_targets()
    steps = []
    for target in targets:
        for anchor in ("pre", "terminal-"):
            steps.append(PrimitiveInstance("OrientToward", {"target": target}, anchor))
    objects = [t for t in targets if t != "user"]
    for target in objects:
        steps.append(
            PrimitiveInstance(
                "AttentionShift", {"from_target": "user", "to_target": target}, "mid"
            )
        )
    steps += [
        PrimitiveInstance("Nod", {}, "mid"),
        PrimitiveInstance("Nod", {}, "terminal-"),
        PrimitiveInstance("Shake", {}, "terminal-"),
        PrimitiveInstance("Wag", {}, "terminal-"),
        PrimitiveInstance("LowerHead", {}, "mid"),
        PrimitiveInstance("Lean", {"amplitude": 0.3}, "pre"),
        PrimitiveInstance("Lean", {"amplitude": -0.25}, "mid"),
        PrimitiveInstance("JerkPulse", {}, "mid"),
        PrimitiveInstance("PauseInsert", {"duration": 0.4}, "pre"),
        PrimitiveInstance("PauseInsert", {"duration": 0.4}, "mid"),
        PrimitiveInstance("SpeedScale", {"factor": 0.6}, "mid"),
        PrimitiveInstance("SpeedScale", {"factor": 0.85}, "mid"),
        PrimitiveInstance("LightEmphasis", {}, "mid"),
        PrimitiveInstance("PointAwayFrom", {"target": "user"}, "mid"),
    ]
    for target in objects:
        steps.append(PrimitiveInstance("Approach", {"target": target}, "terminal-"))
        steps.append(PrimitiveInstance("Avoid", {"target": target}, "mid"))
        steps.append(PrimitiveInstance("Stretch", {"target": target}, "terminal-"))
    return steps


def _evaluate(chain, task, spec, traj, plan, index) -> ScoredPlan:
    F = functional_utility(traj, task)
    E, per_category, scores = expressive_utility(
        chain, traj, task.world, spec, goal_point=task.goal_point(chain)
    )
    return ScoredPlan(
        plan=tuple(plan),
        trajectory=traj,
        F=F,
        E=E,
        per_category=per_category,
        scores=scores,
        duration=traj.duration,
        index=tuple(index),
    )


def _rank_key(candidate: ScoredPlan, gamma: float):
    # highest total wins; ties go to the shorter, lexicographically
    # earliest plan, so the empty baseline wins when expression is free
    return (-candidate.total(gamma), candidate.duration, candidate.index)


def select_best(candidates, gamma: float) -> ScoredPlan:
    if not candidates:
        raise InvalidInput("no candidates to select from")
    return min(candidates, key=lambda c: _rank_key(c, gamma))


def _children(chain, task, spec, parent: ScoredPlan, catalog, base_F):
    """Evaluate every one-step extension of a candidate, skipping steps
    that are infeasible here or that would change the task outcome."""
    out = []
    for step_index, step in enumerate(catalog):
        try:
            traj = apply_primitive(chain, parent.trajectory, step, world=task.world)
        except (Infeasible, TargetMissing, Unreachable):
            continue
        child = _evaluate(
            chain, task, spec, traj,
            parent.plan + (step,), parent.index + (step_index,),
        )
        if child.F != base_F:
            continue
        out.append(child)
    return out


def search_candidates(
    chain: ChainSpec,
    task,
    spec: ExpressionSpec | None,
    config: PlannerConfig,
    gamma: float | None = None,
) -> list:
    """Evaluated candidate plans for a task.

    In exhaustive mode the candidate set is enumerated breadth-first in
    catalog order up to the length and count caps; it does not depend on
    gamma, which search callers exploit to sweep gamma with one enumeration
    pass. In beam mode gamma steers which partial plans survive, so it must
    be provided.
    """
    config.validate()
    base = plan_functional(chain, task, config)
    baseline = _evaluate(chain, task, spec, base, (), ())
    catalog = build_step_catalog(task, config)
    candidates = [baseline]
    budget = config.max_candidates - 1

    if config.mode == "exhaustive":
        level = [baseline]
        for _ in range(config.max_plan_length):
            nxt = []
            for parent in level:
                if budget <= 0:
                    break
                children = _children(chain, task, spec, parent, catalog, baseline.F)
                children = children[: max(budget, 0)]
                budget -= len(children)
                nxt.extend(children)
            candidates.extend(nxt)
            level = nxt
            if budget <= 0:
                break
        return candidates

    if gamma is None:
        raise InvalidInput("beam search needs gamma")
    frontier = [baseline]
    for _ in range(config.max_plan_length):
        expansions = []
        for parent in frontier:
            if budget <= 0:
                break
            children = _children(chain, task, spec, parent, catalog, baseline.F)
            children = children[: max(budget, 0)]
            budget -= len(children)
            expansions.extend(children)
        if not expansions:
            break
        candidates.extend(expansions)
        expansions.sort(key=lambda c: _rank_key(c, gamma))
        frontier = expansions[: config.beam_width]
        if budget <= 0:
            break
    return candidates


def plan_expressive(
    chain: ChainSpec,
    task,
    spec: ExpressionSpec | None,
    gamma: float,
    config: PlannerConfig | None = None,
) -> ScoredPlan:
    """Best-found expressive plan layered on the functional baseline."""
    if gamma < 0 or not np.isfinite(gamma):
        raise InvalidInput("gamma must be finite and non-negative")
    config = config or PlannerConfig()
    candidates = search_candidates(chain, task, spec, config, gamma=gamma)
    return select_best(candidates, gamma)


def sweep_gamma(
    chain: ChainSpec,
    task,
    spec: ExpressionSpec | None,
    gammas,
    config: PlannerConfig | None = None,
) -> list:
    """Best plan per gamma value, as (gamma, ScoredPlan) pairs.

    Exhaustive mode enumerates candidates once and selects per gamma from
    the same pool; beam mode re-runs the gamma-guided search per value.
    """
    config = config or PlannerConfig()
    config.validate()
    gammas = [float(g) for g in gammas]
    for g in gammas:
        if g < 0 or not np.isfinite(g):
            raise InvalidInput("gamma values must be finite and non-negative")
    if config.mode == "exhaustive":
        candidates = search_candidates(chain, task, spec, config)
        return [(g, select_best(candidates, g)) for g in gammas]
    return [(g, plan_expressive(chain, task, spec, g, config)) for g in gammas]

"""Small deterministic grid worlds for studying the planning objective.

The continuous trajectory problem and this discrete one share the same
objective shape: a goal-arrival term plus a weighted expression term summed
over every visited state. The grid version is small enough to solve exactly
with dynamic programming, which makes it the reference for validating
approximate search strategies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

MAX_DIMS = 2
MAX_POSITIONS = 15
MAX_HORIZON = 30


def grid_actions(ndim: int) -> tuple:
    """Unit moves plus stay, in sorted order for deterministic tie-breaks."""
    deltas = {tuple(0 for _ in range(ndim))}
    for axis in range(ndim):
        for step in (-1, 1):
            d = [0] * ndim
            d[axis] = step
            deltas.add(tuple(d))
    return tuple(sorted(deltas))


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma < 0:
        raise InvalidInput("gamma must be finite and non-negative")
    return gamma


@dataclass(frozen=True)
class GridMDP:
    """Deterministic shortest-horizon grid with per-cell expression values.

    Reward at a visited cell is 1 if it is the goal plus gamma times the
    cell's expression value; a plan of `horizon` moves collects the reward
    of every state from the start through the final one. Gamma is supplied
    at solve time, so one instance can be scored under several trade-offs.
    """

    shape: tuple
    start: tuple
    goal: tuple
    horizon: int
    expression: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        object.__setattr__(self, "start", tuple(int(c) for c in self.start))
        object.__setattr__(self, "goal", tuple(int(c) for c in self.goal))
        object.__setattr__(
            self, "expression", np.asarray(self.expression, dtype=float)
        )
        self.validate()

    def validate(self) -> None:
        if not 1 <= len(self.shape) <= MAX_DIMS:
            raise InvalidInput(f"grid must have 1 to {MAX_DIMS} dimensions")
        if any(not 1 <= n <= MAX_POSITIONS for n in self.shape):
            raise InvalidInput(f"each dimension must have 1 to {MAX_POSITIONS} positions")
        if not 1 <= self.horizon <= MAX_HORIZON:
            raise InvalidInput(f"horizon must be 1 to {MAX_HORIZON}")
        if self.expression.shape != self.shape:
            raise InvalidInput("expression table shape must match the grid shape")
        if not np.all(np.isfinite(self.expression)):
            raise InvalidInput("expression values must be finite")
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if len(cell) != len(self.shape):
                raise InvalidInput(f"{name} must have {len(self.shape)} coordinates")
            if any(not 0 <= c < n for c, n in zip(cell, self.shape)):
                raise InvalidInput(f"{name} cell {cell} is outside the grid")

    @property
    def actions(self) -> tuple:
        return grid_actions(len(self.shape))

    def step(self, cell: tuple, action: tuple) -> tuple:
        return tuple(
            min(max(c + d, 0), n - 1) for c, d, n in zip(cell, action, self.shape)
        )

    def reward(self, cell: tuple, gamma: float) -> float:
        base = 1.0 if cell == self.goal else 0.0
        return base + gamma * float(self.expression[cell])

    def cells(self):
        return itertools.product(*(range(n) for n in self.shape))


def _tables(mdp: GridMDP, gamma: float):
    """Flattened reward vector and next-state index table."""
    cells = list(mdp.cells())
    index = {cell: i for i, cell in enumerate(cells)}
    rewards = np.array([mdp.reward(c, gamma) for c in cells])
    actions = mdp.actions
    nxt = np.empty((len(cells), len(actions)), dtype=int)
    for i, cell in enumerate(cells):
        for a, action in enumerate(actions):
            nxt[i, a] = index[mdp.step(cell, action)]
    return cells, index, rewards, nxt


def value_iteration(mdp: GridMDP, gamma: float):
    """Exact optimum by backward dynamic programming.

    Returns (total, path) where path lists the horizon+1 visited cells of a
    reward-maximizing plan and total is its cumulative reward. Ties are
    broken toward the smallest action in sorted order.
    """
    gamma = _check_gamma(gamma)
    cells, index, rewards, nxt = _tables(mdp, gamma)
    T = mdp.horizon
    values = np.empty((T + 1, len(cells)))
    values[T] = rewards
    for t in range(T - 1, -1, -1):
        values[t] = rewards + np.max(values[t + 1][nxt], axis=1)

    path = [mdp.start]
    state = index[mdp.start]
    for t in range(T):
        options = values[t + 1][nxt[state]]
        state = int(nxt[state, int(np.argmax(options))])
        path.append(cells[state])
    total = float(values[0][index[mdp.start]])
    return total, path


def plan_on_grid(mdp: GridMDP, gamma: float, beam_width: int = 3):
    """Beam search over move sequences, deduplicated by cell.

    Keeps the best cumulative reward per occupied cell at each step, then
    the top `beam_width` cells ranked by cumulative reward plus an
    optimistic bonus for goal visits still collectible from that cell, so
    a narrow beam does not wander beyond return range of the goal. The
    bonus only orders the truncation; reported totals are actual rewards,
    and with a beam at least as wide as the grid nothing is truncated and
    the search reduces to exact forward dynamic programming.

    Returns (total, path), never exceeding value_iteration's total.
    """
    gamma = _check_gamma(gamma)
    if beam_width < 1:
        raise InvalidInput("beam_width must be at least 1")
    cells, index, rewards, nxt = _tables(mdp, gamma)
    goal_distance = np.array(
        [sum(abs(a - b) for a, b in zip(cell, mdp.goal)) for cell in cells]
    )
    start = index[mdp.start]
    # frontier: state index -> (cumulative reward, path tuple)
    frontier = {start: (float(rewards[start]), (start,))}
    for t in range(mdp.horizon):
        steps_left = mdp.horizon - (t + 1)
        candidates: dict = {}
        for state, (score, path) in frontier.items():
            for nxt_state in nxt[state]:
                nxt_state = int(nxt_state)
                new_score = score + float(rewards[nxt_state])
                held = candidates.get(nxt_state)
                if held is None or new_score > held[0] + 1e-12:
                    candidates[nxt_state] = (new_score, path + (nxt_state,))
        bonus = np.maximum(steps_left - goal_distance + 1, 0)
        ranked = sorted(
            candidates.items(),
            key=lambda kv: (-(kv[1][0] + bonus[kv[0]]), cells[kv[0]]),
        )
        frontier = dict(ranked[:beam_width])
    best_state, (best_score, best_path) = min(
        frontier.items(), key=lambda kv: (-kv[1][0], cells[kv[0]])
    )
    return float(best_score), [cells[i] for i in best_path]


def random_instance(
    rng: np.random.Generator,
    shape: tuple = (9, 9),
    horizon: int = 15,
    max_manhattan: int = 10,
) -> GridMDP:
    """Sample a solvable instance: goal within reach of the horizon."""
    shape = tuple(shape)
    expression = rng.uniform(0.0, 1.0, size=shape)
    while True:
        start = tuple(int(rng.integers(0, n)) for n in shape)
        goal = tuple(int(rng.integers(0, n)) for n in shape)
        distance = sum(abs(a - b) for a, b in zip(start, goal))
        if 1 <= distance <= min(max_manhattan, horizon):
            break
    return GridMDP(
        shape=shape,
        start=start,
        goal=goal,
        horizon=horizon,
        expression=expression,
    )

"""Exhaustive reference for small grid instances: tries every move sequence.

Kept deliberately independent of the library's dynamic programming code; it
reads only the public fields of a grid instance and enumerates all action
sequences, so it is exact (and exponential - keep horizons small).
"""

import numpy as np


def _deltas(ndim):
    moves = {tuple([0] * ndim)}
    for axis in range(ndim):
        for step in (-1, 1):
            d = [0] * ndim
            d[axis] = step
            moves.add(tuple(d))
    return np.array(sorted(moves))


def best_total(mdp, gamma) -> float:
    """Maximum cumulative reward over every possible move sequence."""
    ndim = len(mdp.shape)
    deltas = _deltas(ndim)
    limits = np.array(mdp.shape) - 1
    goal = np.array(mdp.goal)
    e = np.asarray(mdp.expression, dtype=float)

    def reward(cells):
        at_goal = np.all(cells == goal, axis=1).astype(float)
        return at_goal + gamma * e[tuple(cells.T)]

    cells = np.array([mdp.start])
    totals = reward(cells)
    for _ in range(mdp.horizon):
        cells = cells[:, None, :] + deltas[None, :, :]
        cells = cells.reshape(-1, ndim)
        np.clip(cells, 0, limits, out=cells)
        totals = np.repeat(totals, len(deltas)) + reward(cells)
    return float(np.max(totals))

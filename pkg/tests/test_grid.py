"""Grid worlds: exact dynamic programming vs exhaustive and beam search."""

import numpy as np
import pytest

from lampbot.errors import InvalidInput
from lampbot.grid import GridMDP, grid_actions, plan_on_grid, random_instance, value_iteration

from oracles.mdp_bruteforce import best_total


def small_instance(rng):
    shape = tuple(int(rng.integers(3, 6)) for _ in range(int(rng.integers(1, 3))))
    horizon = int(rng.integers(2, 6))
    expression = rng.uniform(0.0, 1.0, size=shape)
    start = tuple(int(rng.integers(0, n)) for n in shape)
    goal = tuple(int(rng.integers(0, n)) for n in shape)
    return GridMDP(
        shape=shape, start=start, goal=goal, horizon=horizon, expression=expression
    )


def path_total(mdp, path, gamma):
    return sum(mdp.reward(cell, gamma) for cell in path)


class TestValueIteration:
    def test_hand_checked_line(self):
        # three cells in a row, goal at the far end, two moves available:
        # march right, collect the goal reward exactly once at t=2
        mdp = GridMDP(shape=(3,), start=(0,), goal=(2,), horizon=2, expression=np.zeros(3))
        total, path = value_iteration(mdp, 0.0)
        assert total == 1.0
        assert path == [(0,), (1,), (2,)]

    def test_staying_at_goal_accrues_each_step(self):
        mdp = GridMDP(
            shape=(3, 3), start=(1, 1), goal=(1, 1), horizon=4, expression=np.zeros((3, 3))
        )
        total, path = value_iteration(mdp, 0.0)
        assert total == 5.0  # start state plus four stays
        assert all(cell == (1, 1) for cell in path)

    def test_expression_can_justify_detour(self):
        # a high-expression cell adjacent to the straight-line path: with a
        # slack horizon the optimal plan grazes it on the way to the goal
        e = np.zeros((3, 3))
        e[2, 0] = 1.0
        mdp = GridMDP(shape=(3, 3), start=(0, 0), goal=(2, 2), horizon=4, expression=e)
        total0, path0 = value_iteration(mdp, 0.0)
        total1, path1 = value_iteration(mdp, 1.0)
        assert (2, 0) not in path0
        assert (2, 0) in path1
        assert total1 > total0

    def test_gamma_zero_takes_shortest_route_then_dwells(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            mdp = random_instance(rng)
            distance = sum(abs(a - b) for a, b in zip(mdp.start, mdp.goal))
            _, path = value_iteration(mdp, 0.0)
            assert path[distance] == mdp.goal
            assert all(cell == mdp.goal for cell in path[distance:])

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            mdp = small_instance(rng)
            gamma = float(rng.uniform(0.0, 2.0))
            total, path = value_iteration(mdp, gamma)
            np.testing.assert_allclose(total, best_total(mdp, gamma), rtol=0, atol=1e-9)
            np.testing.assert_allclose(path_total(mdp, path, gamma), total, atol=1e-9)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        mdp = small_instance(rng)
        assert value_iteration(mdp, 0.7) == value_iteration(mdp, 0.7)

    def test_path_shape_and_adjacency(self):
        rng = np.random.default_rng(11)
        mdp = random_instance(rng)
        _, path = value_iteration(mdp, 1.0)
        assert len(path) == mdp.horizon + 1
        assert path[0] == mdp.start
        moves = set(grid_actions(len(mdp.shape)))
        for a, b in zip(path, path[1:]):
            delta = tuple(y - x for x, y in zip(a, b))
            assert delta in moves

    def test_gamma_validated(self):
        mdp = GridMDP(shape=(3,), start=(0,), goal=(2,), horizon=2, expression=np.zeros(3))
        with pytest.raises(InvalidInput):
            value_iteration(mdp, -0.5)
        with pytest.raises(InvalidInput):
            plan_on_grid(mdp, float("inf"), beam_width=3)


class TestBeamSearch:
    def test_exhaustive_beam_is_exact(self):
        rng = np.random.default_rng(101)
        for _ in range(30):
            mdp = small_instance(rng)
            gamma = float(rng.uniform(0.0, 2.0))
            n_cells = int(np.prod(mdp.shape))
            exact, _ = value_iteration(mdp, gamma)
            total, path = plan_on_grid(mdp, gamma, beam_width=n_cells)
            np.testing.assert_allclose(total, exact, atol=1e-9)
            np.testing.assert_allclose(path_total(mdp, path, gamma), total, atol=1e-9)

    def test_beam_never_exceeds_exact(self):
        # the oracle bound, over a large batch of instances and widths
        rng = np.random.default_rng(202)
        for _ in range(1000):
            mdp = small_instance(rng)
            gamma = float(rng.uniform(0.0, 2.0))
            width = int(rng.integers(1, 6))
            exact, _ = value_iteration(mdp, gamma)
            total, _ = plan_on_grid(mdp, gamma, beam_width=width)
            assert total <= exact + 1e-9

    def test_narrow_beam_stays_near_exact(self):
        rng = np.random.default_rng(303)
        ratios = []
        for _ in range(50):
            mdp = random_instance(rng)
            exact, _ = value_iteration(mdp, 1.0)
            total, _ = plan_on_grid(mdp, 1.0, beam_width=3)
            ratios.append(total / exact)
        assert float(np.mean(ratios)) >= 0.95

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        mdp = random_instance(rng)
        assert plan_on_grid(mdp, 1.0, beam_width=3) == plan_on_grid(mdp, 1.0, beam_width=3)

    def test_bad_beam_width_rejected(self):
        rng = np.random.default_rng(1)
        with pytest.raises(InvalidInput):
            plan_on_grid(random_instance(rng), 1.0, beam_width=0)


class TestValidation:
    def test_dimension_caps(self):
        with pytest.raises(InvalidInput):
            GridMDP(
                shape=(3, 3, 3), start=(0, 0, 0), goal=(1, 1, 1), horizon=2,
                expression=np.zeros((3, 3, 3)),
            )
        with pytest.raises(InvalidInput):
            GridMDP(
                shape=(20, 3), start=(0, 0), goal=(1, 1), horizon=2,
                expression=np.zeros((20, 3)),
            )

    def test_horizon_cap(self):
        with pytest.raises(InvalidInput):
            GridMDP(
                shape=(3, 3), start=(0, 0), goal=(1, 1), horizon=31,
                expression=np.zeros((3, 3)),
            )

    def test_cells_in_bounds(self):
        with pytest.raises(InvalidInput):
            GridMDP(
                shape=(3, 3), start=(3, 0), goal=(1, 1), horizon=2,
                expression=np.zeros((3, 3)),
            )

    def test_expression_shape_checked(self):
        with pytest.raises(InvalidInput):
            GridMDP(
                shape=(3, 3), start=(0, 0), goal=(1, 1), horizon=2,
                expression=np.zeros((3, 4)),
            )


class TestRandomInstance:
    def test_reproducible_and_solvable(self):
        a = random_instance(np.random.default_rng(5))
        b = random_instance(np.random.default_rng(5))
        assert a.start == b.start and a.goal == b.goal
        np.testing.assert_array_equal(a.expression, b.expression)
        distance = sum(abs(x - y) for x, y in zip(a.start, a.goal))
        assert 1 <= distance <= min(10, a.horizon)

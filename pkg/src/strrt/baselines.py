"""Space-time baselines with a fixed arrival-time bound.

Both planners operate on the configuration space crossed with the bounded
time interval [start time, t_bound].  The bidirectional variant stops at its
first solution; the unidirectional optimizing variant keeps lowering the
arrival time of the best goal node until the budget runs out.  Because the
directional space-time distance is not symmetric, the bidirectional variant
selects neighbors under a symmetrized blend and leaves feasibility to the
motion checks.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .scenario import Scenario
from .solution import RunStats, SolutionPath
from .spacetime import SpaceTimeState, distance, interpolate, lower_bound_arrival_time
from .trees import ExtendStatus, TreeStore


@dataclass(frozen=True)
class BaselineParams:
    """Shared knobs; `t_bound` caps every sampled and reachable time."""

    t_bound: float
    p_goal: float = 0.05
    steer_range: float | None = None
    rewire_neighbors: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not self.t_bound > 0.0:
            raise ValueError("t_bound must be positive")
        if not 0.0 < self.p_goal <= 1.0:
            raise ValueError("p_goal must lie in (0, 1]")


class _BaselineBase:
    def __init__(self, scenario: Scenario, params: BaselineParams):
        self.scenario = scenario
        self.params = params
        self.rng = np.random.default_rng(params.seed)
        self.steer_range = (
            params.steer_range
            if params.steer_range is not None
            else 0.1 * scenario.space.diagonal_extent()
        )
        self.t_hi = min(params.t_bound, scenario.goal.t_max)
        self.stats = RunStats()
        self.best: SolutionPath | None = None
        if not scenario.is_state_valid(scenario.start):
            raise ValueError("start state is invalid")

    def _sample_free(self) -> SpaceTimeState:
        q = self.scenario.space.sample_config(self.rng)
        t = self.rng.uniform(self.scenario.start.t, self.t_hi)
        return SpaceTimeState(q, t)

    def _sample_goal_state(self) -> SpaceTimeState | None:
        """Goal configuration with an arrival time inside the bound."""
        scn = self.scenario
        q = scn.goal.sample_config(self.rng)
        t_lb = scn.start.t + lower_bound_arrival_time(scn.start.q, q, scn.space)
        if not t_lb < self.t_hi:
            return None
        x = SpaceTimeState(q, self.rng.uniform(t_lb, self.t_hi))
        if not scn.is_state_valid(x):
            return None
        return x


class SpaceTimeRRTConnect(_BaselineBase):
    """Bidirectional first-solution planner over the bounded time slab.

    Goal-tree roots accumulate over the run: one is seeded immediately and
    more are added with probability `p_goal` per iteration, each at a
    uniformly drawn feasible arrival time.
    """

    def __init__(self, scenario: Scenario, params: BaselineParams):
        super().__init__(scenario, params)
        self.start_tree = TreeStore(scenario.space, forward=True)
        self.goal_forest = TreeStore(scenario.space, forward=False)
        self.start_tree.add(scenario.start, -1)
        seed_root = self._sample_goal_state()
        if seed_root is not None:
            self.goal_forest.add(seed_root, -1)

    def _step(self, store: TreeStore, near: int, target: SpaceTimeState) -> tuple[ExtendStatus, int]:
        x_near = store.state(near)
        lam = self.scenario.space.lam
        d = lam * float(np.linalg.norm(target.q - x_near.q)) + (1.0 - lam) * abs(
            target.t - x_near.t
        )
        if d == 0.0:
            return ExtendStatus.REACHED, near
        if d <= self.steer_range:
            x_new, status = target, ExtendStatus.REACHED
        else:
            x_new = interpolate(x_near, target, self.steer_range / d)
            status = ExtendStatus.ADVANCED
        lo, hi = (x_near, x_new) if store.forward else (x_new, x_near)
        if not math.isfinite(distance(lo, hi, self.scenario.space)):
            return ExtendStatus.TRAPPED, -1
        if not self.scenario.is_motion_valid(lo, hi):
            return ExtendStatus.TRAPPED, -1
        return status, store.add(x_new, near)

    def _extend(self, store: TreeStore, target: SpaceTimeState) -> tuple[ExtendStatus, int]:
        near, _ = store.nearest_symmetric(target, self.scenario.space.lam)
        if near < 0:
            return ExtendStatus.TRAPPED, -1
        return self._step(store, near, target)

    def _connect(self, store: TreeStore, target: SpaceTimeState) -> tuple[ExtendStatus, int]:
        status, idx = self._extend(store, target)
        while status == ExtendStatus.ADVANCED:
            status, nxt = self._step(store, idx, target)
            if status == ExtendStatus.TRAPPED:
                return ExtendStatus.TRAPPED, -1
            idx = nxt
        return status, idx

    def solve(
        self, budget_s: float | None = None, max_iterations: int | None = None
    ) -> tuple[SolutionPath | None, RunStats]:
        if budget_s is None and max_iterations is None:
            raise ValueError("need a time budget, an iteration cap, or both")
        stats = self.stats
        deterministic = budget_s is None
        t0 = time.perf_counter()
        trees = (self.start_tree, self.goal_forest)
        side = 0
        while self.best is None:
            if budget_s is not None and time.perf_counter() - t0 >= budget_s:
                break
            if max_iterations is not None and stats.iterations >= max_iterations:
                break
            stats.iterations += 1
            if self.rng.random() <= self.params.p_goal:
                root = self._sample_goal_state()
                if root is not None:
                    self.goal_forest.add(root, -1)
                    stats.samples += 1
            x_rand = self._sample_free()
            stats.samples += 1
            tree_a, tree_b = trees[side], trees[1 - side]
            status, new_idx = self._extend(tree_a, x_rand)
            if status != ExtendStatus.TRAPPED:
                c_status, c_idx = self._connect(tree_b, tree_a.state(new_idx))
                if c_status == ExtendStatus.REACHED:
                    if tree_a is self.start_tree:
                        start_leaf, goal_leaf = new_idx, c_idx
                    else:
                        start_leaf, goal_leaf = c_idx, new_idx
                    up = [
                        self.start_tree.state(i)
                        for i in self.start_tree.path_to_root(start_leaf)
                    ]
                    down = [
                        self.goal_forest.state(i)
                        for i in self.goal_forest.path_to_root(goal_leaf)
                    ]
                    states = list(reversed(up)) + down[1:]
                    cost = float(self.goal_forest.root_time[goal_leaf])
                    self.best = SolutionPath(tuple(states), cost)
                    elapsed = None if deterministic else time.perf_counter() - t0
                    stats.record(stats.iterations, elapsed, cost)
            side = 1 - side
        stats.nodes = self.start_tree.n + self.goal_forest.n
        stats.elapsed_s = None if deterministic else time.perf_counter() - t0
        return self.best, stats


class SpaceTimeRRTStar(_BaselineBase):
    """Unidirectional anytime optimizer over the bounded time slab.

    Edges are weighted by the directional space-time distance; the tree
    minimizes accumulated edge weight, while the reported cost of a run is
    the arrival time of the earliest goal node found.
    """

    def __init__(self, scenario: Scenario, params: BaselineParams):
        super().__init__(scenario, params)
        self.tree = TreeStore(scenario.space, forward=True)
        self.tree.add(scenario.start, -1)
        self.cost = np.zeros(256)
        self.goal_nodes: list[int] = []

    def _ensure_cost_capacity(self):
        if self.tree.n > self.cost.shape[0]:
            self.cost = np.concatenate([self.cost, np.zeros(self.cost.shape[0])])

    def _k(self) -> int:
        if self.params.rewire_neighbors is not None:
            return self.params.rewire_neighbors
        n = max(self.tree.alive_count(), 2)
        d_state = self.scenario.dim + 1
        return max(1, math.ceil(math.e * (1.0 + 1.0 / d_state) * math.log(n)))

    def _propagate_delta(self, idx: int, delta: float):
        for j in self.tree.subtree_indices(idx):
            self.cost[j] += delta

    def solve(
        self, budget_s: float | None = None, max_iterations: int | None = None
    ) -> tuple[SolutionPath | None, RunStats]:
        if budget_s is None and max_iterations is None:
            raise ValueError("need a time budget, an iteration cap, or both")
        scn = self.scenario
        space = scn.space
        stats = self.stats
        deterministic = budget_s is None
        t0 = time.perf_counter()
        best_arrival = math.inf
        best_leaf = -1
        while True:
            if budget_s is not None and time.perf_counter() - t0 >= budget_s:
                break
            if max_iterations is not None and stats.iterations >= max_iterations:
                break
            stats.iterations += 1
            if self.rng.random() <= self.params.p_goal:
                x_rand = self._sample_goal_state()
                if x_rand is None:
                    continue
            else:
                x_rand = self._sample_free()
            stats.samples += 1
            near, d_near = self.tree.nearest(x_rand)
            if near < 0:
                continue
            if d_near == 0.0:
                continue
            if d_near <= self.steer_range:
                x_new = x_rand
            else:
                x_new = interpolate(self.tree.state(near), x_rand, self.steer_range / d_near)
            neighbors = self.tree.k_nearest(x_new, self._k(), from_tree=True)
            parent = -1
            parent_cost = math.inf
            # try candidate parents cheapest-first; first valid motion wins
            order = sorted(
                (
                    (self.cost[int(y)] + distance(self.tree.state(int(y)), x_new, space), int(y))
                    for y in neighbors
                ),
            )
            for through, y in order:
                if not math.isfinite(through):
                    break
                if scn.is_motion_valid(self.tree.state(y), x_new):
                    parent, parent_cost = y, through
                    break
            if parent < 0:
                continue
            new_idx = self.tree.add(x_new, parent)
            self._ensure_cost_capacity()
            self.cost[new_idx] = parent_cost
            for y in self.tree.k_nearest(x_new, self._k(), from_tree=False):
                y = int(y)
                d_out = distance(x_new, self.tree.state(y), space)
                if self.cost[new_idx] + d_out < self.cost[y] and scn.is_motion_valid(
                    x_new, self.tree.state(y)
                ):
                    delta = self.cost[new_idx] + d_out - self.cost[y]
                    self.tree.set_parent(y, new_idx)
                    self._propagate_delta(y, delta)
                    stats.rewires += 1
            if scn.goal.contains_config(x_new.q) and x_new.t < best_arrival:
                best_arrival = x_new.t
                best_leaf = new_idx
                states = [
                    self.tree.state(i) for i in reversed(self.tree.path_to_root(best_leaf))
                ]
                self.best = SolutionPath(tuple(states), best_arrival)
                elapsed = None if deterministic else time.perf_counter() - t0
                stats.record(stats.iterations, elapsed, best_arrival)
        stats.nodes = self.tree.n
        stats.elapsed_s = None if deterministic else time.perf_counter() - t0
        return self.best, stats

"""Bidirectional anytime planner through space-time with unbounded time.

The planner grows a start tree forward in time and a forest of goal trees
backward in time.  When the goal's arrival time is unbounded, goal samples
are drawn from a time window that expands geometrically in batches; the
sampler keeps old and newly-added windows balanced so goal times stay close
to uniformly covered.  Whenever the trees meet, the incumbent arrival time
becomes a hard bound: both trees and the stored goal samples are pruned
against it, and the search keeps improving the incumbent until the budget
runs out.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .scenario import Scenario
from .solution import RunStats, SolutionPath
from .spacetime import (
    SpaceTimeState,
    distance,
    interpolate,
    lower_bound_arrival_time,
    max_valid_time_arrays,
)
from .trees import ExtendStatus, TreeStore


@dataclass(frozen=True)
class ExpansionParams:
    """Controls of the geometric goal-time window expansion.

    `weighted=False` disables the old/new window split: goal times are then
    drawn uniformly from the whole current window each time, which over-samples
    early times as the window stretches.
    """

    range_factor: float = 2.0
    initial_batch_size: int = 512
    sample_ratio: float = 0.5
    weighted: bool = True

    def __post_init__(self):
        if not self.range_factor > 1.0:
            raise ValueError("range_factor must exceed 1")
        if self.initial_batch_size < 1:
            raise ValueError("initial_batch_size must be at least 1")
        if not 0.0 < self.sample_ratio < 1.0:
            raise ValueError("sample_ratio must lie strictly between 0 and 1")


class GoalSet:
    """Growable flat arrays of goal states (configurations and times)."""

    def __init__(self, dim: int, capacity: int = 64):
        self._q = np.empty((capacity, dim))
        self._t = np.empty(capacity)
        self.n = 0

    @property
    def q(self) -> np.ndarray:
        return self._q[: self.n]

    @property
    def t(self) -> np.ndarray:
        return self._t[: self.n]

    def __len__(self) -> int:
        return self.n

    def add(self, q: np.ndarray, t: float):
        if self.n == self._q.shape[0]:
            self._q = np.concatenate([self._q, np.empty_like(self._q)])
            self._t = np.concatenate([self._t, np.empty_like(self._t)])
        self._q[self.n] = q
        self._t[self.n] = t
        self.n += 1

    def states(self) -> list[SpaceTimeState]:
        return [SpaceTimeState(self._q[i], self._t[i]) for i in range(self.n)]

    def absorb(self, other: "GoalSet"):
        for i in range(other.n):
            self.add(other._q[i], other._t[i])
        other.n = 0

    def keep_before(self, t_max: float) -> int:
        """Drop entries with t >= t_max; returns how many were dropped."""
        keep = self.t < t_max
        kept = int(np.count_nonzero(keep))
        dropped = self.n - kept
        if dropped:
            self._q[:kept] = self.q[keep]
            self._t[:kept] = self.t[keep]
            self.n = kept
        return dropped


@dataclass
class ExpansionState:
    """Mutable bookkeeping of the goal-time window expansion."""

    time_range: float
    new_time_range: float
    batch_size: int
    samples_in_batch: int
    total_samples: int
    batch_probability: float
    goals: GoalSet
    new_goals: GoalSet


def initialize_bound_variables(params: ExpansionParams, dim: int) -> ExpansionState:
    return ExpansionState(
        time_range=params.range_factor,
        new_time_range=params.range_factor,
        batch_size=params.initial_batch_size,
        samples_in_batch=0,
        total_samples=0,
        batch_probability=1.0,
        goals=GoalSet(dim),
        new_goals=GoalSet(dim),
    )


def update_goal_region(bounds: ExpansionState, params: ExpansionParams, t_max: float) -> ExpansionState:
    """Widen the goal-time window once the current batch is exhausted.

    No-op while the arrival time is bounded or the batch still has room.
    The next batch is sized so the share of samples devoted to the newly
    opened window stays at `sample_ratio`.
    """
    if math.isinf(t_max) and bounds.samples_in_batch >= bounds.batch_size:
        bounds.time_range = bounds.new_time_range
        bounds.new_time_range = bounds.time_range * params.range_factor
        bounds.batch_size = max(
            1,
            math.ceil(
                (params.range_factor - 1.0) * bounds.total_samples / params.sample_ratio
            ),
        )
        bounds.batch_probability = (1.0 - params.sample_ratio) / params.range_factor
        bounds.goals.absorb(bounds.new_goals)
        bounds.samples_in_batch = 0
    return bounds


def sample_goal(
    scenario: Scenario,
    bounds: ExpansionState,
    t_max: float,
    rng: np.random.Generator,
    time_floor: float,
    weighted: bool = True,
) -> SpaceTimeState | None:
    """Draw a goal configuration and an arrival time for a new goal-tree root.

    Bounded mode draws times from [earliest arrival, t_max).  Unbounded mode
    draws from the current window with probability `batch_probability` and
    from the newly opened window otherwise; `time_floor` keeps the
    multiplicative windows non-degenerate when the earliest arrival is 0.
    Returns None when the window is empty or the state is in collision.
    """
    q = scenario.goal.sample_config(rng)
    t_lb = scenario.start.t + lower_bound_arrival_time(scenario.start.q, q, scenario.space)
    into_new = False
    if math.isfinite(t_max):
        lo, hi = t_lb, t_max
    else:
        base = max(t_lb, time_floor)
        if not weighted:
            lo, hi = t_lb, base * bounds.new_time_range
        elif rng.random() <= bounds.batch_probability:
            lo, hi = t_lb, base * bounds.time_range
        else:
            lo, hi = base * bounds.time_range, base * bounds.new_time_range
            into_new = True
    if not hi > lo:
        return None
    t = rng.uniform(lo, hi)
    x = SpaceTimeState(q, t)
    if not scenario.is_state_valid(x):
        return None
    if into_new:
        bounds.new_goals.add(x.q, x.t)
    else:
        bounds.goals.add(x.q, x.t)
    return x


def sample_conditionally(
    scenario: Scenario,
    bounds: ExpansionState,
    rng: np.random.Generator,
    min_axis_travel_time: bool = False,
    max_tries: int = 10_000,
) -> SpaceTimeState | None:
    """Draw a space-time sample whose time admits reaching some known goal.

    The time is drawn above the earliest arrival from the start and below
    the latest useful departure toward the current goals; with probability
    `1 - batch_probability` it is instead pushed into the band only the
    newly added goals can serve.  Returns None if no admissible sample is
    found within `max_tries` draws.
    """
    if len(bounds.goals) == 0 and len(bounds.new_goals) == 0:
        return None
    space = scenario.space
    start = scenario.start
    for _ in range(max_tries):
        q = space.sample_config(rng)
        t_lb = start.t + lower_bound_arrival_time(start.q, q, space)
        if rng.random() < bounds.batch_probability:
            lo = t_lb
            hi = max_valid_time_arrays(
                q, bounds.goals.q, bounds.goals.t, space, min_axis_travel_time
            )
        else:
            lo = max(
                t_lb,
                max_valid_time_arrays(
                    q, bounds.goals.q, bounds.goals.t, space, min_axis_travel_time
                ),
            )
            hi = max_valid_time_arrays(
                q, bounds.new_goals.q, bounds.new_goals.t, space, min_axis_travel_time
            )
        if hi > lo:
            return SpaceTimeState(q, rng.uniform(lo, hi))
    return None


@dataclass(frozen=True)
class PlannerParams:
    """Tuning knobs of the bidirectional space-time planner."""

    p_goal: float = 0.05
    t_max: float = math.inf
    steer_range: float | None = None
    rewire_neighbors: int | None = None
    expansion: ExpansionParams = field(default_factory=ExpansionParams)
    min_axis_travel_time: bool = False
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.p_goal <= 1.0:
            raise ValueError("p_goal must lie in (0, 1]")
        if not self.t_max > 0.0:
            raise ValueError("t_max must be positive")
        if self.steer_range is not None and not self.steer_range > 0.0:
            raise ValueError("steer_range must be positive")


class STRRTStar:
    """Bidirectional anytime planner minimizing arrival time.

    Usage: construct with a scenario, then call `solve` with a wall-clock
    budget and/or an iteration cap.  `solve` returns the best solution found
    (or None) together with run statistics.
    """

    def __init__(self, scenario: Scenario, params: PlannerParams = PlannerParams()):
        self.scenario = scenario
        self.params = params
        space = scenario.space
        self.steer_range = (
            params.steer_range
            if params.steer_range is not None
            else 0.1 * space.diagonal_extent()
        )
        self.time_floor = 1e-3 * self.steer_range
        self.rng = np.random.default_rng(params.seed)
        self.t_max = min(params.t_max, scenario.goal.t_max)
        self.start_tree = TreeStore(space, forward=True)
        self.goal_forest = TreeStore(space, forward=False)
        self.bounds = initialize_bound_variables(params.expansion, space.dim)
        self.best: SolutionPath | None = None
        self.stats = RunStats()
        if not scenario.is_state_valid(scenario.start):
            raise ValueError("start state is invalid")
        self.start_tree.add(scenario.start, -1)

    # -- tree operations --------------------------------------------------

    def _step(
        self, store: TreeStore, near: int, d: float, target: SpaceTimeState
    ) -> tuple[ExtendStatus, int]:
        """Steer from node `near` (at distance `d`) toward `target` and
        insert the reached state if the motion is valid."""
        if d == 0.0:
            return ExtendStatus.REACHED, near
        if d <= self.steer_range:
            x_new, status = target, ExtendStatus.REACHED
        else:
            x_new = interpolate(store.state(near), target, self.steer_range / d)
            status = ExtendStatus.ADVANCED
        if store.forward:
            lo, hi = store.state(near), x_new
        else:
            lo, hi = x_new, store.state(near)
        # re-check the steered state: rounding can push a step that rides the
        # velocity-cone boundary just outside it
        if not math.isfinite(distance(lo, hi, self.scenario.space)):
            return ExtendStatus.TRAPPED, -1
        if not self.scenario.is_motion_valid(lo, hi):
            return ExtendStatus.TRAPPED, -1
        if store.forward and not self._useful_for_start(x_new):
            return ExtendStatus.TRAPPED, -1
        return status, store.add(x_new, near)

    def _extend(self, store: TreeStore, target: SpaceTimeState) -> tuple[ExtendStatus, int]:
        """One bounded step of `store` toward `target`."""
        near, d = store.nearest(target)
        if near < 0:
            return ExtendStatus.TRAPPED, -1
        return self._step(store, near, d, target)

    def _useful_for_start(self, x: SpaceTimeState) -> bool:
        """A start-tree node is kept only if it can still beat the bound."""
        if math.isinf(self.t_max):
            return True
        return x.t + self.scenario.goal.min_travel_time(x.q, self.scenario.space) < self.t_max

    def _connect(self, store: TreeStore, target: SpaceTimeState) -> tuple[ExtendStatus, int]:
        """Greedy chain of steps from `store`'s closest node to `target`.

        After the first nearest-neighbor step, each following step continues
        from the node just added; the gap shrinks by the steering range per
        step, so the chain terminates.
        """
        status, idx = self._extend(store, target)
        while status == ExtendStatus.ADVANCED:
            x_near = store.state(idx)
            if store.forward:
                d = distance(x_near, target, self.scenario.space)
            else:
                d = distance(target, x_near, self.scenario.space)
            if not math.isfinite(d):
                return ExtendStatus.TRAPPED, -1
            status, nxt = self._step(store, idx, d, target)
            if status == ExtendStatus.TRAPPED:
                return ExtendStatus.TRAPPED, -1
            idx = nxt
        return status, idx

    def _rewire(self, new_idx: int):
        """Reparent goal-forest neighbors onto the new node when its tree
        arrives strictly earlier; the reparented subtree adopts that root."""
        store = self.goal_forest
        x_new = store.state(new_idx)
        n = store.alive_count()
        k = self.params.rewire_neighbors
        if k is None:
            d_state = self.scenario.dim + 1
            k = max(1, math.ceil(math.e * (1.0 + 1.0 / d_state) * math.log(max(n, 2))))
        new_root_time = store.root_time[new_idx]
        for y in store.k_nearest(x_new, k, from_tree=True):
            y = int(y)
            if store.root_time[y] <= new_root_time:
                continue
            if not self.scenario.is_motion_valid(store.state(y), x_new):
                continue
            store.set_parent(y, new_idx)
            store.reroot_subtree(y, int(store.root_id[new_idx]), new_root_time)
            self.stats.rewires += 1

    def _prune(self):
        """Drop everything that can no longer beat the current bound."""
        tm = self.t_max
        pruned = self.goal_forest.kill_mask(self.goal_forest.root_time >= tm)
        score = self.start_tree.t + self.scenario.goal.min_travel_time_many(
            self.start_tree.q, self.scenario.space
        )
        pruned += self.start_tree.kill_mask(score >= tm)
        self.bounds.goals.keep_before(tm)
        self.bounds.new_goals.keep_before(tm)
        self.stats.prunes += pruned

    def _harvest(self, start_leaf: int, goal_leaf: int, iteration: int, elapsed: float | None):
        """Record the meeting of the trees if it improves the incumbent."""
        cost = float(self.goal_forest.root_time[goal_leaf])
        if self.best is not None and not cost < self.best.cost:
            return
        up = [self.start_tree.state(i) for i in self.start_tree.path_to_root(start_leaf)]
        down = [self.goal_forest.state(i) for i in self.goal_forest.path_to_root(goal_leaf)]
        states = list(reversed(up)) + down[1:]
        self.best = SolutionPath(tuple(states), cost)
        self.stats.record(iteration, elapsed, cost)
        self.t_max = cost
        self.bounds.batch_probability = 1.0
        self._prune()

    # -- main loop ---------------------------------------------------------

    def solve(
        self,
        budget_s: float | None = None,
        max_iterations: int | None = None,
        stop_on_first: bool = False,
    ) -> tuple[SolutionPath | None, RunStats]:
        if budget_s is None and max_iterations is None:
            raise ValueError("need a time budget, an iteration cap, or both")
        scenario = self.scenario
        params = self.params
        bounds = self.bounds
        stats = self.stats
        rng = self.rng
        deterministic = budget_s is None
        t0 = time.perf_counter()
        trees = (self.start_tree, self.goal_forest)
        side = 0
        while True:
            if budget_s is not None and time.perf_counter() - t0 >= budget_s:
                break
            if max_iterations is not None and stats.iterations >= max_iterations:
                break
            if not self.start_tree.alive[0]:
                break  # start can no longer beat the bound: incumbent is final
            stats.iterations += 1
            update_goal_region(bounds, params.expansion, self.t_max)
            if rng.random() <= params.p_goal:
                g = sample_goal(
                    scenario, bounds, self.t_max, rng, self.time_floor,
                    weighted=params.expansion.weighted,
                )
                if g is not None:
                    self.goal_forest.add(g, -1)
                    stats.samples += 1
            x_rand = sample_conditionally(
                scenario, bounds, rng, params.min_axis_travel_time
            )
            if x_rand is not None:
                stats.samples += 1
                tree_a, tree_b = trees[side], trees[1 - side]
                status, new_idx = self._extend(tree_a, x_rand)
                if status != ExtendStatus.TRAPPED:
                    bounds.total_samples += 1
                    bounds.samples_in_batch += 1
                    if tree_a is self.goal_forest:
                        self._rewire(new_idx)
                    x_new = tree_a.state(new_idx)
                    c_status, c_idx = self._connect(tree_b, x_new)
                    if c_status == ExtendStatus.REACHED:
                        elapsed = None if deterministic else time.perf_counter() - t0
                        if tree_a is self.start_tree:
                            self._harvest(new_idx, c_idx, stats.iterations, elapsed)
                        else:
                            self._harvest(c_idx, new_idx, stats.iterations, elapsed)
                        if stop_on_first:
                            side = 1 - side
                            break
            side = 1 - side
        stats.nodes = self.start_tree.n + self.goal_forest.n
        stats.elapsed_s = None if deterministic else time.perf_counter() - t0
        return self.best, stats

    def snapshot(self) -> dict:
        """Plain-list dump of both trees for rendering and inspection."""
        def dump(store: TreeStore) -> dict:
            return {
                "q": store.q.tolist(),
                "t": store.t.tolist(),
                "parent": store.parent.tolist(),
                "root_id": store.root_id.tolist(),
                "root_time": store.root_time.tolist(),
                "alive": store.alive.tolist(),
            }

        return {
            "start": dump(self.start_tree),
            "goal": dump(self.goal_forest),
            "t_max": None if math.isinf(self.t_max) else self.t_max,
            "time_range": self.bounds.time_range,
            "new_time_range": self.bounds.new_time_range,
        }

"""Space-time states, the velocity-constrained distance, and goal regions.

The planning state is a configuration paired with a time stamp.  Distances
between states are directional: a state can only be reached from an earlier
state, and only if every axis can cover its displacement within the per-axis
velocity limit.
"""

import math
from dataclasses import dataclass, field

import numpy as np


def _frozen_array(values, dim: int | None = None) -> np.ndarray:
    a = np.array(values, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"expected {dim} components, got {a.shape[0]}")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SpaceTimeState:
    """A configuration `q` at time `t`."""

    q: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen_array(self.q))
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def same_as(self, other: "SpaceTimeState") -> bool:
        return self.t == other.t and np.array_equal(self.q, other.q)

    def __repr__(self) -> str:
        return f"SpaceTimeState(q={self.q.tolist()}, t={self.t})"


@dataclass(frozen=True, eq=False)
class SpaceTimeSpace:
    """Bounded configuration space crossed with an unbounded time axis.

    `lam` weighs the spatial term of the distance against the elapsed-time
    term; `vmax` bounds the absolute velocity per axis.
    """

    lower: np.ndarray
    upper: np.ndarray
    vmax: np.ndarray
    lam: float = 0.5

    def __post_init__(self):
        lower = _frozen_array(self.lower)
        upper = _frozen_array(self.upper, dim=lower.shape[0])
        vmax = _frozen_array(self.vmax, dim=lower.shape[0])
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "vmax", vmax)
        object.__setattr__(self, "lam", float(self.lam))
        if not np.all(lower < upper):
            raise ValueError("lower bounds must be strictly below upper bounds")
        if not np.all(vmax > 0):
            raise ValueError("velocity limits must be positive")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie strictly between 0 and 1")

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, q: np.ndarray) -> bool:
        return bool(np.all(q >= self.lower) and np.all(q <= self.upper))

    def sample_config(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)

    def diagonal_extent(self) -> float:
        """Distance-weighted diagonal of the bounds; a scale for steering."""
        span = self.upper - self.lower
        return self.lam * float(np.linalg.norm(span)) + (1.0 - self.lam) * float(
            np.max(span / self.vmax)
        )


def config_distance(q1: np.ndarray, q2: np.ndarray) -> float:
    return float(np.linalg.norm(q2 - q1))


def lower_bound_arrival_time(q_from: np.ndarray, q_to: np.ndarray, space: SpaceTimeSpace) -> float:
    """Minimum travel time between configurations under the velocity limits."""
    return float(np.max(np.abs(q_to - q_from) / space.vmax))


def distance(a: SpaceTimeState, b: SpaceTimeState, space: SpaceTimeSpace) -> float:
    """Directional space-time distance from `a` to `b`.

    Finite only when `b` is strictly later and every axis can cover the
    displacement at its velocity limit; identical states have distance zero.
    """
    if a.same_as(b):
        return 0.0
    dt = b.t - a.t
    if dt <= 0.0:
        return math.inf
    dq = np.abs(b.q - a.q)
    if np.any(dq > space.vmax * dt):
        return math.inf
    return space.lam * config_distance(a.q, b.q) + (1.0 - space.lam) * dt


def interpolate(a: SpaceTimeState, b: SpaceTimeState, s: float) -> SpaceTimeState:
    """Linear blend of `a` and `b`; s=0 gives `a`, s=1 gives `b`."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("interpolation parameter must lie in [0, 1]")
    if s == 0.0:
        return a
    if s == 1.0:
        return b
    return SpaceTimeState(a.q + s * (b.q - a.q), a.t + s * (b.t - a.t))


def directional_dists(
    qs: np.ndarray,
    ts: np.ndarray,
    x: SpaceTimeState,
    space: SpaceTimeSpace,
    reverse: bool = False,
) -> np.ndarray:
    """Vectorized `distance` from each row of (qs, ts) to `x`.

    With `reverse=True` the direction flips: distance from `x` to each row.
    Exact coincidence with `x` yields 0 like the scalar form.
    """
    dq = x.q[None, :] - qs
    dt = x.t - ts
    if reverse:
        dq = -dq
        dt = -dt
    feasible = (dt > 0.0) & np.all(np.abs(dq) <= space.vmax[None, :] * dt[:, None], axis=1)
    d = np.full(ts.shape[0], np.inf)
    norm = np.sqrt(np.einsum("ij,ij->i", dq, dq))
    np.copyto(d, space.lam * norm + (1.0 - space.lam) * dt, where=feasible)
    same = (dt == 0.0) & np.all(dq == 0.0, axis=1)
    d[same] = 0.0
    return d


def max_valid_time(
    q: np.ndarray,
    goals,
    space: SpaceTimeSpace,
    min_axis_travel_time: bool = False,
) -> float:
    """Latest departure time from `q` that still reaches some known goal.

    Uses the slowest axis as the travel-time bound by default; the
    `min_axis_travel_time` variant uses the fastest axis instead, which
    inflates the bound and admits unreachable departure times.
    """
    best = -math.inf
    for g in goals:
        rates = np.abs(g.q - q) / space.vmax
        travel = float(np.min(rates)) if min_axis_travel_time else float(np.max(rates))
        best = max(best, g.t - travel)
    return best


def max_valid_time_arrays(
    q: np.ndarray,
    goal_qs: np.ndarray,
    goal_ts: np.ndarray,
    space: SpaceTimeSpace,
    min_axis_travel_time: bool = False,
) -> float:
    """`max_valid_time` against flat arrays of goal configurations/times."""
    if goal_ts.shape[0] == 0:
        return -math.inf
    rates = np.abs(goal_qs - q[None, :]) / space.vmax[None, :]
    travel = rates.min(axis=1) if min_axis_travel_time else rates.max(axis=1)
    return float(np.max(goal_ts - travel))


@dataclass(frozen=True, eq=False)
class GoalRegion:
    """Goal configurations (a finite set or an axis-aligned box) with an
    optional hard bound on arrival time."""

    q_set: tuple[np.ndarray, ...] | None = None
    q_box: tuple[np.ndarray, np.ndarray] | None = None
    t_max: float = math.inf

    def __post_init__(self):
        if (self.q_set is None) == (self.q_box is None):
            raise ValueError("exactly one of q_set and q_box must be given")
        if self.q_set is not None:
            configs = tuple(_frozen_array(qg) for qg in self.q_set)
            if not configs:
                raise ValueError("q_set must not be empty")
            dims = {c.shape[0] for c in configs}
            if len(dims) > 1:
                raise ValueError("goal configurations must share a dimension")
            object.__setattr__(self, "q_set", configs)
        else:
            lo = _frozen_array(self.q_box[0])
            hi = _frozen_array(self.q_box[1], dim=lo.shape[0])
            if not np.all(lo <= hi):
                raise ValueError("goal box must satisfy lo <= hi")
            object.__setattr__(self, "q_box", (lo, hi))
        object.__setattr__(self, "t_max", float(self.t_max))
        if not self.t_max > 0.0:
            raise ValueError("t_max must be positive")

    @property
    def dim(self) -> int:
        if self.q_set is not None:
            return self.q_set[0].shape[0]
        return self.q_box[0].shape[0]

    def sample_config(self, rng: np.random.Generator) -> np.ndarray:
        if self.q_set is not None:
            return self.q_set[rng.integers(len(self.q_set))]
        lo, hi = self.q_box
        return rng.uniform(lo, hi)

    def contains_config(self, q: np.ndarray, atol: float = 1e-9) -> bool:
        if self.q_set is not None:
            return any(np.allclose(q, qg, atol=atol, rtol=0.0) for qg in self.q_set)
        lo, hi = self.q_box
        return bool(np.all(q >= lo - atol) and np.all(q <= hi + atol))

    def min_travel_time(self, q: np.ndarray, space: SpaceTimeSpace) -> float:
        """Lower bound on travel time from `q` into the region."""
        if self.q_set is not None:
            return min(lower_bound_arrival_time(q, qg, space) for qg in self.q_set)
        lo, hi = self.q_box
        nearest = np.clip(q, lo, hi)
        return lower_bound_arrival_time(q, nearest, space)

    def min_travel_time_many(self, qs: np.ndarray, space: SpaceTimeSpace) -> np.ndarray:
        """`min_travel_time` for each row of `qs`."""
        if self.q_set is not None:
            per_goal = [
                np.max(np.abs(qg[None, :] - qs) / space.vmax[None, :], axis=1)
                for qg in self.q_set
            ]
            return np.min(np.stack(per_goal, axis=0), axis=0)
        lo, hi = self.q_box
        nearest = np.clip(qs, lo[None, :], hi[None, :])
        return np.max(np.abs(nearest - qs) / space.vmax[None, :], axis=1)

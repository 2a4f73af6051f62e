"""Planning scenarios: moving obstacles, validity checks, JSON I/O, generators.

A scenario bundles the space-time space, the start state, the goal region,
the robot radius, and the dynamic obstacles.  Obstacles come in two kinds:
spheres that move along piecewise-linear waypoint trajectories (holding their
end positions outside the waypoint span), and static axis-aligned boxes that
blink out of existence during open time windows.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .spacetime import (
    GoalRegion,
    SpaceTimeSpace,
    SpaceTimeState,
    _frozen_array,
    interpolate,
)


class ScenarioFormatError(ValueError):
    """Raised when a scenario document is malformed; carries the field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True, eq=False)
class ObstacleTrajectory:
    """Piecewise-linear motion through waypoints; clamps outside the span."""

    times: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        positions = np.atleast_2d(np.array(self.positions, dtype=float))
        if times.ndim != 1 or times.shape[0] != positions.shape[0]:
            raise ValueError("one waypoint position per waypoint time required")
        if times.shape[0] == 0:
            raise ValueError("trajectory needs at least one waypoint")
        if np.any(np.diff(times) <= 0):
            raise ValueError("waypoint times must be strictly increasing")
        times.flags.writeable = False
        positions.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def positions_at(self, ts: np.ndarray) -> np.ndarray:
        out = np.empty((ts.shape[0], self.dim))
        for d in range(self.dim):
            out[:, d] = np.interp(ts, self.times, self.positions[:, d])
        return out

    def position_at(self, t: float) -> np.ndarray:
        return self.positions_at(np.array([t]))[0]


@dataclass(frozen=True, eq=False)
class SphereObstacle:
    """Moving closed ball; collision when center distance <= radius + robot."""

    radius: float
    trajectory: ObstacleTrajectory

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True, eq=False)
class BoxObstacle:
    """Static closed box, inactive during its open time windows.

    The box blocks the robot center point only; the robot radius is not
    added to box extents.
    """

    lo: np.ndarray
    hi: np.ndarray
    open_windows: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        lo = _frozen_array(self.lo)
        hi = _frozen_array(self.hi, dim=lo.shape[0])
        if not np.all(lo < hi):
            raise ValueError("box must satisfy lo < hi")
        windows = tuple((float(a), float(b)) for a, b in self.open_windows)
        for a, b in windows:
            if not a < b:
                raise ValueError("open window must satisfy t0 < t1")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "open_windows", windows)

    def active_at(self, ts: np.ndarray) -> np.ndarray:
        """Boolean mask: box is solid at each time (windows are open sets)."""
        active = np.ones(ts.shape[0], dtype=bool)
        for a, b in self.open_windows:
            active &= ~((ts > a) & (ts < b))
        return active


@dataclass(frozen=True, eq=False)
class Scenario:
    """A complete planning problem over a space-time space."""

    space: SpaceTimeSpace
    start: SpaceTimeState
    goal: GoalRegion
    robot_radius: float = 0.0
    check_resolution: float = 0.01
    sphere_obstacles: tuple[SphereObstacle, ...] = ()
    box_obstacles: tuple[BoxObstacle, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sphere_obstacles", tuple(self.sphere_obstacles))
        object.__setattr__(self, "box_obstacles", tuple(self.box_obstacles))
        object.__setattr__(self, "robot_radius", float(self.robot_radius))
        object.__setattr__(self, "check_resolution", float(self.check_resolution))
        d = self.space.dim
        if self.start.dim != d or self.goal.dim != d:
            raise ValueError("start and goal dimension must match the space")
        if not self.space.contains(self.start.q):
            raise ValueError("start configuration lies outside the bounds")
        goal_configs = self.goal.q_set if self.goal.q_set is not None else self.goal.q_box
        for qg in goal_configs:
            if not self.space.contains(qg):
                raise ValueError("goal configurations must lie inside the bounds")
        if self.robot_radius < 0:
            raise ValueError("robot radius must be non-negative")
        if not self.check_resolution > 0:
            raise ValueError("check resolution must be positive")
        for obs in self.sphere_obstacles:
            if obs.trajectory.dim != d:
                raise ValueError("sphere trajectory dimension must match the space")
        for obs in self.box_obstacles:
            if obs.lo.shape[0] != d:
                raise ValueError("box dimension must match the space")

    @property
    def dim(self) -> int:
        return self.space.dim

    def states_valid(self, qs: np.ndarray, ts: np.ndarray) -> np.ndarray:
        """Vectorized validity of configuration rows at matching times."""
        valid = np.all(qs >= self.space.lower[None, :], axis=1) & np.all(
            qs <= self.space.upper[None, :], axis=1
        )
        for obs in self.sphere_obstacles:
            if not valid.any():
                break
            centers = obs.trajectory.positions_at(ts)
            gap = obs.radius + self.robot_radius
            diff = qs - centers
            hit = np.einsum("ij,ij->i", diff, diff) <= gap * gap
            valid &= ~hit
        for obs in self.box_obstacles:
            if not valid.any():
                break
            inside = np.all(qs >= obs.lo[None, :], axis=1) & np.all(
                qs <= obs.hi[None, :], axis=1
            )
            valid &= ~(inside & obs.active_at(ts))
        return valid

    def is_state_valid(self, x: SpaceTimeState) -> bool:
        return bool(self.states_valid(x.q[None, :], np.array([x.t]))[0])

    def is_motion_valid(self, a: SpaceTimeState, b: SpaceTimeState) -> bool:
        """Check the straight segment from `a` to `b` at the scenario's
        resolution, endpoints included."""
        span = self.space.lam * float(np.linalg.norm(b.q - a.q)) + (
            1.0 - self.space.lam
        ) * abs(b.t - a.t)
        n = max(1, math.ceil(span / self.check_resolution))
        fr = np.linspace(0.0, 1.0, n + 1)
        qs = a.q[None, :] + fr[:, None] * (b.q - a.q)[None, :]
        ts = a.t + fr * (b.t - a.t)
        return bool(self.states_valid(qs, ts).all())


# ---------------------------------------------------------------------------
# JSON document I/O


def _expect(cond: bool, path: str, message: str):
    if not cond:
        raise ScenarioFormatError(path, message)


def _number(value, path: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), path, "expected a number")
    v = float(value)
    _expect(math.isfinite(v), path, "expected a finite number")
    return v


def _vector(value, path: str, dim: int | None = None) -> list[float]:
    _expect(isinstance(value, list) and len(value) > 0, path, "expected a non-empty array of numbers")
    out = [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if dim is not None:
        _expect(len(out) == dim, path, f"expected {dim} components, got {len(out)}")
    return out


def _obj(value, path: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    _expect(isinstance(value, dict), path, "expected an object")
    for key in required:
        _expect(key in value, path, f"missing required key '{key}'")
    for key in value:
        _expect(key in required or key in optional, f"{path}.{key}", "unknown key")
    return value


def scenario_to_dict(scn: Scenario) -> dict:
    goal: dict = {}
    if scn.goal.q_set is not None:
        goal["q_set"] = [qg.tolist() for qg in scn.goal.q_set]
    else:
        goal["q_box"] = [scn.goal.q_box[0].tolist(), scn.goal.q_box[1].tolist()]
    goal["t_max"] = "inf" if math.isinf(scn.goal.t_max) else scn.goal.t_max
    doc = {
        "dim": scn.dim,
        "lower": scn.space.lower.tolist(),
        "upper": scn.space.upper.tolist(),
        "vmax": scn.space.vmax.tolist(),
        "lambda": scn.space.lam,
        "start": {"q": scn.start.q.tolist(), "t": scn.start.t},
        "goal": goal,
        "robot_radius": scn.robot_radius,
        "check_resolution": scn.check_resolution,
        "sphere_obstacles": [
            {
                "radius": obs.radius,
                "waypoints": [
                    [t, pos.tolist()]
                    for t, pos in zip(obs.trajectory.times.tolist(), obs.trajectory.positions)
                ],
            }
            for obs in scn.sphere_obstacles
        ],
        "box_obstacles": [
            {
                "lo": obs.lo.tolist(),
                "hi": obs.hi.tolist(),
                "open_windows": [[a, b] for a, b in obs.open_windows],
            }
            for obs in scn.box_obstacles
        ],
    }
    return doc


def scenario_from_dict(doc: dict) -> Scenario:
    _obj(
        doc,
        "$",
        required=("dim", "lower", "upper", "vmax", "start", "goal"),
        optional=(
            "lambda",
            "robot_radius",
            "check_resolution",
            "sphere_obstacles",
            "box_obstacles",
        ),
    )
    _expect(isinstance(doc["dim"], int) and not isinstance(doc["dim"], bool), "$.dim", "expected an integer")
    dim = doc["dim"]
    _expect(dim >= 1, "$.dim", "dimension must be at least 1")
    lower = _vector(doc["lower"], "$.lower", dim)
    upper = _vector(doc["upper"], "$.upper", dim)
    vmax = _vector(doc["vmax"], "$.vmax", dim)
    lam = _number(doc.get("lambda", 0.5), "$.lambda")
    try:
        space = SpaceTimeSpace(lower, upper, vmax, lam)
    except ValueError as e:
        raise ScenarioFormatError("$", str(e)) from e

    start_doc = _obj(doc["start"], "$.start", required=("q", "t"))
    start = SpaceTimeState(_vector(start_doc["q"], "$.start.q", dim), _number(start_doc["t"], "$.start.t"))

    goal_doc = _obj(doc["goal"], "$.goal", required=(), optional=("q_set", "q_box", "t_max"))
    _expect(
        ("q_set" in goal_doc) != ("q_box" in goal_doc),
        "$.goal",
        "exactly one of 'q_set' and 'q_box' required",
    )
    t_max_raw = goal_doc.get("t_max", "inf")
    if t_max_raw == "inf":
        t_max = math.inf
    else:
        t_max = _number(t_max_raw, "$.goal.t_max")
    try:
        if "q_set" in goal_doc:
            _expect(
                isinstance(goal_doc["q_set"], list) and len(goal_doc["q_set"]) > 0,
                "$.goal.q_set",
                "expected a non-empty array",
            )
            q_set = [
                _vector(qg, f"$.goal.q_set[{i}]", dim) for i, qg in enumerate(goal_doc["q_set"])
            ]
            goal = GoalRegion(q_set=tuple(np.array(qg) for qg in q_set), t_max=t_max)
        else:
            box = goal_doc["q_box"]
            _expect(isinstance(box, list) and len(box) == 2, "$.goal.q_box", "expected [lo, hi]")
            lo = _vector(box[0], "$.goal.q_box[0]", dim)
            hi = _vector(box[1], "$.goal.q_box[1]", dim)
            goal = GoalRegion(q_box=(np.array(lo), np.array(hi)), t_max=t_max)
    except ScenarioFormatError:
        raise
    except ValueError as e:
        raise ScenarioFormatError("$.goal", str(e)) from e

    spheres = []
    for i, obs_doc in enumerate(doc.get("sphere_obstacles", [])):
        path = f"$.sphere_obstacles[{i}]"
        obs_doc = _obj(obs_doc, path, required=("radius", "waypoints"))
        radius = _number(obs_doc["radius"], f"{path}.radius")
        _expect(radius > 0, f"{path}.radius", "radius must be positive")
        wps = obs_doc["waypoints"]
        _expect(isinstance(wps, list) and len(wps) > 0, f"{path}.waypoints", "expected a non-empty array")
        times, positions = [], []
        for j, wp in enumerate(wps):
            wp_path = f"{path}.waypoints[{j}]"
            _expect(isinstance(wp, list) and len(wp) == 2, wp_path, "expected [t, [pos]]")
            times.append(_number(wp[0], f"{wp_path}[0]"))
            positions.append(_vector(wp[1], f"{wp_path}[1]", dim))
        try:
            traj = ObstacleTrajectory(times, positions)
        except ValueError as e:
            raise ScenarioFormatError(f"{path}.waypoints", str(e)) from e
        spheres.append(SphereObstacle(radius, traj))

    boxes = []
    for i, obs_doc in enumerate(doc.get("box_obstacles", [])):
        path = f"$.box_obstacles[{i}]"
        obs_doc = _obj(obs_doc, path, required=("lo", "hi"), optional=("open_windows",))
        lo = _vector(obs_doc["lo"], f"{path}.lo", dim)
        hi = _vector(obs_doc["hi"], f"{path}.hi", dim)
        windows = []
        for j, win in enumerate(obs_doc.get("open_windows", [])):
            win_path = f"{path}.open_windows[{j}]"
            _expect(isinstance(win, list) and len(win) == 2, win_path, "expected [t0, t1]")
            windows.append((_number(win[0], f"{win_path}[0]"), _number(win[1], f"{win_path}[1]")))
        try:
            boxes.append(BoxObstacle(lo, hi, tuple(windows)))
        except ValueError as e:
            raise ScenarioFormatError(path, str(e)) from e

    robot_radius = _number(doc.get("robot_radius", 0.0), "$.robot_radius")
    check_resolution = _number(doc.get("check_resolution", 0.01), "$.check_resolution")
    try:
        return Scenario(
            space=space,
            start=start,
            goal=goal,
            robot_radius=robot_radius,
            check_resolution=check_resolution,
            sphere_obstacles=tuple(spheres),
            box_obstacles=tuple(boxes),
        )
    except ValueError as e:
        raise ScenarioFormatError("$", str(e)) from e


def load_scenario(data: str | bytes) -> Scenario:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ScenarioFormatError("$", f"invalid JSON: {e}") from e
    return scenario_from_dict(doc)


def save_scenario(scn: Scenario) -> str:
    return json.dumps(scenario_to_dict(scn), indent=2) + "\n"


def load_scenario_file(path) -> Scenario:
    with open(path, "rb") as fh:
        return load_scenario(fh.read())


# ---------------------------------------------------------------------------
# Generators


def make_narrow_passage(
    dim: int = 1,
    windows: tuple[tuple[float, float], ...] = ((4.0, 4.5), (8.0, 8.5), (12.0, 12.5)),
    wall_thickness: float = 0.1,
    t_max: float = math.inf,
) -> Scenario:
    """Unit cube split by a wall on the first axis; the wall opens only
    during the given time windows."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    lower = np.zeros(dim)
    upper = np.ones(dim)
    start_q = np.full(dim, 0.5)
    goal_q = np.full(dim, 0.5)
    start_q[0] = 0.1
    goal_q[0] = 0.9
    wall_lo = np.zeros(dim)
    wall_hi = np.ones(dim)
    wall_lo[0] = 0.5 - wall_thickness / 2.0
    wall_hi[0] = 0.5 + wall_thickness / 2.0
    return Scenario(
        space=SpaceTimeSpace(lower, upper, np.ones(dim)),
        start=SpaceTimeState(start_q, 0.0),
        goal=GoalRegion(q_set=(goal_q,), t_max=t_max),
        robot_radius=0.0,
        check_resolution=0.01,
        box_obstacles=(BoxObstacle(wall_lo, wall_hi, tuple(windows)),),
    )


def make_cluttered(
    dim: int = 2,
    n_obstacles: int = 10,
    seed: int = 0,
    obstacle_radius: float = 0.07,
    robot_radius: float = 0.03,
    horizon: float = 4.0,
    t_max: float = math.inf,
) -> Scenario:
    """Unit cube with spheres gliding between random endpoints.

    Obstacles are resampled if they would cover the start at departure or
    park on the goal after coming to rest; obstacle speed is not tied to the
    robot's velocity limit.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if n_obstacles < 0:
        raise ValueError("n_obstacles must be non-negative")
    rng = np.random.default_rng(seed)
    lower = np.zeros(dim)
    upper = np.ones(dim)
    start_q = np.full(dim, 0.08)
    goal_q = np.full(dim, 0.92)
    clearance = obstacle_radius + robot_radius + 0.03
    spheres = []
    for _ in range(n_obstacles):
        for _attempt in range(1000):
            a = rng.uniform(0.05, 0.95, size=dim)
            b = rng.uniform(0.05, 0.95, size=dim)
            if np.linalg.norm(a - start_q) <= clearance:
                continue
            if np.linalg.norm(b - goal_q) <= clearance:
                continue
            break
        else:
            raise RuntimeError("could not place obstacle clear of start and goal")
        t0 = rng.uniform(0.0, horizon / 4.0)
        t1 = t0 + rng.uniform(horizon / 2.0, horizon)
        spheres.append(SphereObstacle(obstacle_radius, ObstacleTrajectory([t0, t1], [a, b])))
    return Scenario(
        space=SpaceTimeSpace(lower, upper, np.ones(dim)),
        start=SpaceTimeState(start_q, 0.0),
        goal=GoalRegion(q_set=(goal_q,), t_max=t_max),
        robot_radius=robot_radius,
        check_resolution=0.01,
        sphere_obstacles=tuple(spheres),
    )

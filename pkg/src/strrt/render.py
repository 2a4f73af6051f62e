"""Figure rendering for scenarios, trees, solutions, and benchmark curves.

All figures are written as SVG with a fixed hash salt and no embedded date,
so identical inputs produce byte-identical files.  One spatial dimension is
drawn as the configuration-time plane; two dimensions become a strip of
time frames.  Higher dimensions are not renderable.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import AggregateCurve
from .scenario import Scenario
from .solution import SolutionPath

COLOR_START_TREE = "#1f77b4"
COLOR_GOAL_TREE = "#d62728"
COLOR_OBSTACLE = "#111111"
COLOR_GOAL = "#f4c20d"
COLOR_SOLUTION = "#ff7f0e"


class RenderDimensionError(ValueError):
    """Raised for scenarios with more than two spatial dimensions."""


def _deterministic_rc():
    plt.rcParams["svg.hashsalt"] = "strrt"


def _save(fig, out_path):
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _time_horizon(scenario: Scenario, solution, snapshot, t_hi):
    if t_hi is not None:
        return float(t_hi)
    if solution is not None:
        return 1.2 * solution.cost
    if snapshot is not None and snapshot.get("t_max") is not None:
        return 1.2 * float(snapshot["t_max"])
    span = scenario.space.upper - scenario.space.lower
    return 2.0 * float(np.max(span / scenario.space.vmax))


def _draw_tree_1d(ax, dump: dict, color: str):
    segments_x, segments_y = [], []
    parents = dump["parent"]
    qs = dump["q"]
    ts = dump["t"]
    alive = dump["alive"]
    for i, p in enumerate(parents):
        if p < 0 or not (alive[i] and alive[p]):
            continue
        segments_x.extend([qs[p][0], qs[i][0], None])
        segments_y.extend([ts[p], ts[i], None])
    if segments_x:
        ax.plot(
            [np.nan if v is None else v for v in segments_x],
            [np.nan if v is None else v for v in segments_y],
            color=color,
            lw=0.5,
            alpha=0.6,
            zorder=2,
        )


def _render_1d(scenario: Scenario, out_path, snapshot, solution, horizon):
    _deterministic_rc()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    lo = scenario.space.lower[0]
    hi = scenario.space.upper[0]
    for obs in scenario.box_obstacles:
        edges = [0.0]
        for a, b in sorted(obs.open_windows):
            edges.extend([a, b])
        edges.append(horizon)
        # solid stretches between consecutive open windows
        for t0, t1 in zip(edges[0::2], edges[1::2]):
            t0, t1 = max(t0, 0.0), min(t1, horizon)
            if t1 > t0:
                ax.fill_betweenx(
                    [t0, t1], obs.lo[0], obs.hi[0], color=COLOR_OBSTACLE, zorder=1
                )
    ts = np.linspace(0.0, horizon, 512)
    for obs in scenario.sphere_obstacles:
        centers = obs.trajectory.positions_at(ts)[:, 0]
        pad = obs.radius + scenario.robot_radius
        ax.fill_betweenx(ts, centers - pad, centers + pad, color=COLOR_OBSTACLE, zorder=1)
    if scenario.goal.q_set is not None:
        for qg in scenario.goal.q_set:
            ax.plot(
                [qg[0], qg[0]],
                [0.0, min(horizon, scenario.goal.t_max)],
                color=COLOR_GOAL,
                lw=3.0,
                alpha=0.9,
                zorder=3,
            )
    else:
        glo, ghi = scenario.goal.q_box
        ax.fill_betweenx(
            [0.0, min(horizon, scenario.goal.t_max)],
            glo[0],
            ghi[0],
            color=COLOR_GOAL,
            alpha=0.5,
            zorder=0,
        )
    if snapshot is not None:
        _draw_tree_1d(ax, snapshot["start"], COLOR_START_TREE)
        _draw_tree_1d(ax, snapshot["goal"], COLOR_GOAL_TREE)
    if solution is not None:
        ax.plot(
            [s.q[0] for s in solution.states],
            [s.t for s in solution.states],
            color=COLOR_SOLUTION,
            lw=2.0,
            zorder=4,
        )
    ax.plot([scenario.start.q[0]], [scenario.start.t], "o", color=COLOR_START_TREE, zorder=5)
    ax.set_xlim(lo, hi)
    ax.set_ylim(0.0, horizon)
    ax.set_xlabel("q")
    ax.set_ylabel("t")
    fig.tight_layout()
    _save(fig, out_path)


def _render_2d(scenario: Scenario, out_path, solution, horizon, frames):
    _deterministic_rc()
    frame_times = np.linspace(0.0, horizon, frames)
    fig, axes = plt.subplots(1, frames, figsize=(2.6 * frames, 2.8), squeeze=False)
    sol_q = sol_t = None
    if solution is not None:
        sol_q = np.array([s.q for s in solution.states])
        sol_t = np.array([s.t for s in solution.states])
    for ax, t in zip(axes[0], frame_times):
        ax.set_aspect("equal")
        for obs in scenario.box_obstacles:
            if obs.active_at(np.array([t]))[0]:
                ax.fill(
                    [obs.lo[0], obs.hi[0], obs.hi[0], obs.lo[0]],
                    [obs.lo[1], obs.lo[1], obs.hi[1], obs.hi[1]],
                    color=COLOR_OBSTACLE,
                )
        for obs in scenario.sphere_obstacles:
            c = obs.trajectory.position_at(t)
            ax.add_patch(plt.Circle((c[0], c[1]), obs.radius, color=COLOR_OBSTACLE))
        goal_configs = (
            scenario.goal.q_set if scenario.goal.q_set is not None else scenario.goal.q_box
        )
        if scenario.goal.q_set is not None:
            for qg in goal_configs:
                ax.plot([qg[0]], [qg[1]], "s", color=COLOR_GOAL, ms=8)
        else:
            glo, ghi = goal_configs
            ax.fill(
                [glo[0], ghi[0], ghi[0], glo[0]],
                [glo[1], glo[1], ghi[1], ghi[1]],
                color=COLOR_GOAL,
                alpha=0.5,
            )
        if sol_q is not None:
            done = sol_t <= t
            if np.count_nonzero(done) >= 2:
                ax.plot(sol_q[done, 0], sol_q[done, 1], color=COLOR_SOLUTION, lw=1.5)
            pos = np.array(
                [np.interp(t, sol_t, sol_q[:, d]) for d in range(2)]
            )
            circle = plt.Circle(
                (pos[0], pos[1]),
                max(scenario.robot_radius, 0.01),
                color=COLOR_SOLUTION,
            )
            ax.add_patch(circle)
        ax.plot([scenario.start.q[0]], [scenario.start.q[1]], "o", color=COLOR_START_TREE, ms=4)
        ax.set_xlim(scenario.space.lower[0], scenario.space.upper[0])
        ax.set_ylim(scenario.space.lower[1], scenario.space.upper[1])
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(f"t={t:.2f}", fontsize=8)
    fig.tight_layout()
    _save(fig, out_path)


def render_scenario(
    scenario: Scenario,
    out_path,
    snapshot: dict | None = None,
    solution: SolutionPath | None = None,
    t_hi: float | None = None,
    frames: int = 6,
):
    """Write an SVG view of the scenario (and optional trees/solution)."""
    horizon = _time_horizon(scenario, solution, snapshot, t_hi)
    if scenario.dim == 1:
        _render_1d(scenario, out_path, snapshot, solution, horizon)
    elif scenario.dim == 2:
        _render_2d(scenario, out_path, solution, horizon, frames)
    else:
        raise RenderDimensionError(
            f"cannot render {scenario.dim} spatial dimensions (1 or 2 supported)"
        )


def render_success_rate(curves: list[AggregateCurve], out_path, x_label: str = "time [s]"):
    """Success-rate-over-budget figure for every planner."""
    _deterministic_rc()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for curve in curves:
        ax.plot(curve.grid, curve.success_rate, label=curve.planner)
    ax.set_xlabel(x_label)
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def render_cost_convergence(curves: list[AggregateCurve], out_path, x_label: str = "time [s]"):
    """Median cost with its confidence band; gaps where the median is inf."""
    _deterministic_rc()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for curve in curves:
        med = np.where(np.isfinite(curve.cost_median), curve.cost_median, np.nan)
        lo = np.where(np.isfinite(curve.cost_lo), curve.cost_lo, np.nan)
        hi = np.where(np.isfinite(curve.cost_hi), curve.cost_hi, np.nan)
        (line,) = ax.plot(curve.grid, med, label=curve.planner)
        ax.fill_between(curve.grid, lo, hi, alpha=0.25, color=line.get_color(), lw=0)
    ax.set_xlabel(x_label)
    ax.set_ylabel("arrival time")
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)

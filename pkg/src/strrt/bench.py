"""Benchmark protocol: repeated seeded runs, delimited exports, aggregation.

Each configured planner is run `runs` times on the same scenario with seeds
`base_seed + i`.  Runs either share a wall-clock budget or a fixed iteration
cap; with an iteration cap all timing fields are omitted so outputs are
byte-identical across machines.  Failed runs enter the aggregation with
infinite cost.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import BaselineParams, SpaceTimeRRTConnect, SpaceTimeRRTStar
from .planner import ExpansionParams, PlannerParams, STRRTStar
from .scenario import Scenario
from .solution import RunStats


class UnknownPlannerError(ValueError):
    pass


PLANNER_KINDS = ("strrt", "rrtconnect", "rrtstar")

_EXPANSION_KEYS = ("range_factor", "initial_batch_size", "sample_ratio", "weighted")
_STRRT_KEYS = (
    "p_goal",
    "t_max",
    "steer_range",
    "rewire_neighbors",
    "min_axis_travel_time",
) + _EXPANSION_KEYS
_BASELINE_KEYS = ("t_bound", "p_goal", "steer_range", "rewire_neighbors")


def make_planner(kind: str, scenario: Scenario, seed: int, params: dict | None = None):
    """Instantiate a planner by kind name with flat parameter overrides."""
    params = dict(params or {})
    if kind == "strrt":
        unknown = set(params) - set(_STRRT_KEYS)
        if unknown:
            raise UnknownPlannerError(f"unknown strrt parameters: {sorted(unknown)}")
        expansion = ExpansionParams(
            **{k: params.pop(k) for k in _EXPANSION_KEYS if k in params}
        )
        return STRRTStar(scenario, PlannerParams(seed=seed, expansion=expansion, **params))
    if kind == "rrtconnect" or kind == "rrtstar":
        unknown = set(params) - set(_BASELINE_KEYS)
        if unknown:
            raise UnknownPlannerError(f"unknown {kind} parameters: {sorted(unknown)}")
        if "t_bound" not in params:
            raise UnknownPlannerError(f"{kind} requires a t_bound parameter")
        cls = SpaceTimeRRTConnect if kind == "rrtconnect" else SpaceTimeRRTStar
        return cls(scenario, BaselineParams(seed=seed, **params))
    raise UnknownPlannerError(f"unknown planner kind: {kind!r}")


@dataclass(frozen=True)
class PlannerSpec:
    """One benchmark entry: a planner kind, a display label, overrides."""

    kind: str
    label: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one seeded run."""

    planner: str
    seed: int
    first_solution_s: float | None
    first_solution_iteration: int | None
    final_cost: float
    improvements: tuple[tuple[int, float | None, float], ...]

    @staticmethod
    def from_stats(planner: str, seed: int, stats: RunStats) -> "RunRecord":
        first = stats.first_solution
        return RunRecord(
            planner=planner,
            seed=seed,
            first_solution_s=None if first is None else first.elapsed_s,
            first_solution_iteration=None if first is None else first.iteration,
            final_cost=stats.final_cost,
            improvements=tuple(
                (im.iteration, im.elapsed_s, im.cost) for im in stats.improvements
            ),
        )


def run_benchmark(
    scenario: Scenario,
    planners: list[PlannerSpec],
    runs: int,
    base_seed: int = 0,
    budget_s: float | None = None,
    max_iterations: int | None = None,
    progress=None,
) -> list[RunRecord]:
    """Run every planner `runs` times; returns records sorted by (label, seed)."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    labels = [spec.label for spec in planners]
    if len(set(labels)) != len(labels):
        raise ValueError("planner labels must be unique")
    records = []
    for spec in planners:
        for i in range(runs):
            seed = base_seed + i
            planner = make_planner(spec.kind, scenario, seed, spec.params)
            _, stats = planner.solve(budget_s=budget_s, max_iterations=max_iterations)
            records.append(RunRecord.from_stats(spec.label, seed, stats))
            if progress is not None:
                progress(spec.label, seed, stats)
    records.sort(key=lambda r: (r.planner, r.seed))
    return records


# ---------------------------------------------------------------------------
# Aggregation


def median_ci_ranks(n: int, z: float = 1.96) -> tuple[int, int]:
    """1-indexed order-statistic ranks of a ~95% confidence band around the
    median of `n` values."""
    r = math.floor((n - z * math.sqrt(n)) / 2.0)
    r = max(1, min(r, n))
    return r, max(r, n - r)


@dataclass(frozen=True)
class AggregateCurve:
    """Success rate and cost quantiles of one planner over a shared grid.

    The grid is wall-clock seconds for budgeted runs and iteration counts
    for iteration-capped runs.
    """

    planner: str
    grid: np.ndarray
    success_rate: np.ndarray
    cost_median: np.ndarray
    cost_lo: np.ndarray
    cost_hi: np.ndarray


def _progress_key(improvement: tuple[int, float | None, float]) -> float:
    iteration, elapsed_s, _ = improvement
    return float(iteration) if elapsed_s is None else elapsed_s


def costs_at(records: list[RunRecord], at: float) -> np.ndarray:
    """Incumbent cost of every record at grid position `at` (inf if none)."""
    out = np.full(len(records), math.inf)
    for i, rec in enumerate(records):
        for improvement in rec.improvements:
            if _progress_key(improvement) <= at:
                out[i] = improvement[2]
            else:
                break
    return out


def aggregate(records: list[RunRecord], grid) -> list[AggregateCurve]:
    """Per-planner success-rate and cost curves over a shared grid."""
    grid = np.asarray(grid, dtype=float)
    by_planner: dict[str, list[RunRecord]] = {}
    for rec in records:
        by_planner.setdefault(rec.planner, []).append(rec)
    curves = []
    for planner, recs in sorted(by_planner.items()):
        n = len(recs)
        r_lo, r_hi = median_ci_ranks(n)
        success = np.empty(grid.shape[0])
        med = np.empty(grid.shape[0])
        lo = np.empty(grid.shape[0])
        hi = np.empty(grid.shape[0])
        for j, at in enumerate(grid):
            costs = np.sort(costs_at(recs, at))
            success[j] = np.count_nonzero(np.isfinite(costs)) / n
            med[j] = np.median(costs)
            lo[j] = costs[r_lo - 1]
            hi[j] = costs[r_hi - 1]
        curves.append(AggregateCurve(planner, grid, success, med, lo, hi))
    return curves


def default_grid(horizon: float, points: int = 100) -> np.ndarray:
    return np.linspace(horizon / points, horizon, points)


# ---------------------------------------------------------------------------
# Delimited exports


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    return repr(float(value))


def records_to_csv(records: list[RunRecord]) -> str:
    lines = ["planner,seed,first_solution_s,final_cost"]
    for rec in records:
        lines.append(
            f"{rec.planner},{rec.seed},{_fmt(rec.first_solution_s)},{_fmt(rec.final_cost)}"
        )
    return "\n".join(lines) + "\n"


def curve_to_csv(curve: AggregateCurve) -> str:
    lines = ["t,success_rate,cost_median,cost_lo,cost_hi"]
    for j in range(curve.grid.shape[0]):
        lines.append(
            ",".join(
                (
                    _fmt(float(curve.grid[j])),
                    _fmt(float(curve.success_rate[j])),
                    _fmt(float(curve.cost_median[j])),
                    _fmt(float(curve.cost_lo[j])),
                    _fmt(float(curve.cost_hi[j])),
                )
            )
        )
    return "\n".join(lines) + "\n"


def _cost_json(value: float) -> float | str:
    return "inf" if math.isinf(value) else value


def records_to_jsonl(records: list[RunRecord]) -> str:
    lines = []
    for rec in records:
        doc = {
            "planner": rec.planner,
            "seed": rec.seed,
            "first_solution_s": rec.first_solution_s,
            "first_solution_iteration": rec.first_solution_iteration,
            "final_cost": _cost_json(rec.final_cost),
            "improvements": [
                {"iteration": it, "elapsed_s": es, "cost": _cost_json(c)}
                for it, es, c in rec.improvements
            ],
        }
        lines.append(json.dumps(doc))
    return "\n".join(lines) + "\n"


def records_from_jsonl(text: str) -> list[RunRecord]:
    records = []
    for line in text.splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)

        def cost(v):
            return math.inf if v == "inf" else float(v)

        records.append(
            RunRecord(
                planner=doc["planner"],
                seed=doc["seed"],
                first_solution_s=doc["first_solution_s"],
                first_solution_iteration=doc["first_solution_iteration"],
                final_cost=cost(doc["final_cost"]),
                improvements=tuple(
                    (im["iteration"], im["elapsed_s"], cost(im["cost"]))
                    for im in doc["improvements"]
                ),
            )
        )
    return records

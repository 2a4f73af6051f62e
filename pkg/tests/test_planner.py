"""End-to-end behavior of the bidirectional space-time planner."""

import math

import numpy as np
import pytest

from audits import audit_planner, audit_solution
from strrt.planner import ExpansionParams, PlannerParams, STRRTStar
from strrt.scenario import Scenario, make_cluttered, make_narrow_passage
from strrt.solution import SolutionPath
from strrt.spacetime import GoalRegion, SpaceTimeSpace, SpaceTimeState


def solve_narrow(seed=0, iterations=8000, **kw):
    scn = make_narrow_passage()
    planner = STRRTStar(scn, PlannerParams(seed=seed, **kw))
    sol, stats = planner.solve(max_iterations=iterations)
    return planner, sol, stats


@pytest.fixture(scope="module")
def narrow_run():
    return solve_narrow()


@pytest.fixture(scope="module")
def narrow_run_long():
    return solve_narrow(iterations=20000)


def test_solves_narrow_passage_and_passes_audits(narrow_run):
    planner, sol, stats = narrow_run
    assert sol is not None
    audit_planner(planner, sol)
    # the wall first opens at t=4: any crossing arrives after that
    assert sol.cost > 4.0
    assert stats.final_cost == sol.cost
    assert stats.iterations == 8000
    assert stats.elapsed_s is None  # iteration-budget runs carry no wall times


def test_solution_path_shape(narrow_run):
    _, sol, _ = narrow_run
    assert sol.states[0].same_as(make_narrow_passage().start)
    assert sol.states[-1].q[0] == 0.9
    ts = [x.t for x in sol.states]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert sol.cost == ts[-1]


def test_iteration_budget_is_deterministic():
    _, sol_a, stats_a = solve_narrow(seed=5, iterations=6000)
    _, sol_b, stats_b = solve_narrow(seed=5, iterations=6000)
    assert sol_a.to_json() == sol_b.to_json()
    assert stats_a.to_dict() == stats_b.to_dict()
    _, sol_c, _ = solve_narrow(seed=6, iterations=6000)
    assert sol_c.to_json() != sol_a.to_json()


def test_anytime_improvements_decrease(narrow_run_long):
    planner, sol, stats = narrow_run_long
    assert len(stats.improvements) >= 2  # keeps improving after first contact
    costs = [im.cost for im in stats.improvements]
    assert all(b < a for a, b in zip(costs, costs[1:]))
    assert stats.final_cost == costs[-1]
    assert planner.t_max == costs[-1]  # incumbent becomes the pruning bound


def test_stop_on_first_halts_early():
    scn = make_narrow_passage()
    planner = STRRTStar(scn, PlannerParams(seed=0))
    sol, stats = planner.solve(max_iterations=50000, stop_on_first=True)
    assert sol is not None
    assert len(stats.improvements) == 1
    assert stats.iterations < 50000
    audit_planner(planner, sol)


def test_bounded_arrival_time_respected():
    # generous bound: solvable, and the solution must respect it
    scn = make_narrow_passage(t_max=6.0)
    planner = STRRTStar(scn, PlannerParams(seed=1))
    sol, _ = planner.solve(max_iterations=10000)
    assert sol is not None
    assert sol.cost < 6.0
    audit_planner(planner, sol)


def test_infeasible_bound_yields_no_solution():
    # the wall only opens at t=4; arriving before t=3 is impossible
    scn = make_narrow_passage(t_max=3.0)
    planner = STRRTStar(scn, PlannerParams(seed=0))
    sol, stats = planner.solve(max_iterations=4000)
    assert sol is None
    assert math.isinf(stats.final_cost)
    audit_planner(planner)


def test_unreachable_goal_region_no_solution():
    # goal farther than the velocity limit allows within the bound
    scn = Scenario(
        space=SpaceTimeSpace([0.0], [1.0], [0.1]),
        start=SpaceTimeState([0.0], 0.0),
        goal=GoalRegion(q_set=(np.array([1.0]),), t_max=5.0),  # needs t >= 10
    )
    planner = STRRTStar(scn, PlannerParams(seed=0))
    sol, stats = planner.solve(max_iterations=500)
    assert sol is None
    # the bounded goal window [10, 5) is empty: no sample is ever accepted
    assert stats.samples == 0
    assert planner.goal_forest.n == 0


def test_invalid_start_rejected():
    scn = make_narrow_passage()
    bad = Scenario(
        space=scn.space,
        start=SpaceTimeState([0.5], 0.0),  # inside the wall at t=0
        goal=scn.goal,
        box_obstacles=scn.box_obstacles,
    )
    with pytest.raises(ValueError):
        STRRTStar(bad)


def test_min_axis_travel_time_still_solves_in_1d():
    # with one axis the two travel-time variants coincide
    planner, sol, stats = solve_narrow(min_axis_travel_time=True)
    assert sol is not None
    audit_planner(planner, sol)


def test_two_dimensional_cluttered_smoke():
    scn = make_cluttered(dim=2, n_obstacles=6, seed=0)
    planner = STRRTStar(scn, PlannerParams(seed=0))
    sol, stats = planner.solve(max_iterations=3000)
    assert sol is not None
    audit_planner(planner, sol)
    # start and goal are diagonal corners of the unit square
    assert sol.cost >= 0.84


def test_rewires_and_prunes_happen(narrow_run_long):
    planner, sol, stats = narrow_run_long
    assert stats.rewires > 0
    assert stats.prunes > 0
    assert stats.nodes == planner.start_tree.n + planner.goal_forest.n


def test_unweighted_goal_sampling_still_solves():
    planner, sol, _ = solve_narrow(
        iterations=12000, expansion=ExpansionParams(weighted=False)
    )
    assert sol is not None
    audit_planner(planner, sol)


def test_snapshot_round_trips_to_plain_lists():
    planner, _, _ = solve_narrow(iterations=2000)
    snap = planner.snapshot()
    assert set(snap) == {"start", "goal", "t_max", "time_range", "new_time_range"}
    for key in ("start", "goal"):
        dump = snap[key]
        n = len(dump["t"])
        assert len(dump["q"]) == n and len(dump["parent"]) == n
        assert all(isinstance(v, list) for v in dump["q"])
    assert snap["start"]["parent"][0] == -1


def test_solution_path_validation():
    a = SpaceTimeState([0.0], 0.0)
    b = SpaceTimeState([0.5], 1.0)
    with pytest.raises(ValueError):
        SolutionPath((a,), 0.0)  # too short
    with pytest.raises(ValueError):
        SolutionPath((b, a), 1.0)  # time runs backward
    with pytest.raises(ValueError):
        SolutionPath((a, b), 2.0)  # cost must equal the arrival time
    path = SolutionPath((a, b), 1.0)
    assert SolutionPath.from_json(path.to_json()).to_json() == path.to_json()

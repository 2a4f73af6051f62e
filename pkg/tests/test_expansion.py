"""Goal-time window expansion and the two samplers that consume it."""

import math

import numpy as np
import pytest

from strrt.planner import (
    ExpansionParams,
    GoalSet,
    initialize_bound_variables,
    sample_conditionally,
    sample_goal,
    update_goal_region,
)
from strrt.scenario import BoxObstacle, Scenario, make_narrow_passage
from strrt.spacetime import (
    GoalRegion,
    SpaceTimeSpace,
    SpaceTimeState,
    distance,
    lower_bound_arrival_time,
)

INF = math.inf


def open_corridor(start_q=0.1, goal_q=0.9, t_max=INF):
    return Scenario(
        space=SpaceTimeSpace([0.0], [1.0], [1.0]),
        start=SpaceTimeState([start_q], 0.0),
        goal=GoalRegion(q_set=(np.array([goal_q]),), t_max=t_max),
    )


def test_expansion_params_validation():
    with pytest.raises(ValueError):
        ExpansionParams(range_factor=1.0)
    with pytest.raises(ValueError):
        ExpansionParams(initial_batch_size=0)
    with pytest.raises(ValueError):
        ExpansionParams(sample_ratio=1.0)
    with pytest.raises(ValueError):
        ExpansionParams(sample_ratio=0.0)


def test_initial_bound_variables():
    params = ExpansionParams(range_factor=3.0, initial_batch_size=7)
    b = initialize_bound_variables(params, dim=2)
    assert b.time_range == 3.0
    assert b.new_time_range == 3.0
    assert b.batch_size == 7
    assert b.samples_in_batch == 0
    assert b.total_samples == 0
    assert b.batch_probability == 1.0
    assert len(b.goals) == 0 and len(b.new_goals) == 0


@pytest.mark.parametrize(
    "range_factor, sample_ratio, total, batch_size, batch_probability",
    [
        (2.0, 0.5, 100, 200, 0.25),
        (3.0, 0.5, 100, 400, 1.0 / 6.0),
        (2.0, 0.25, 100, 400, 0.375),
        (1.5, 0.5, 200, 200, 1.0 / 3.0),
        (4.0, 0.8, 50, 188, 0.05),
        (2.0, 0.5, 0, 1, 0.25),  # batch size never collapses to zero
    ],
)
def test_batch_update_arithmetic(range_factor, sample_ratio, total, batch_size, batch_probability):
    params = ExpansionParams(
        range_factor=range_factor, initial_batch_size=4, sample_ratio=sample_ratio
    )
    b = initialize_bound_variables(params, dim=1)
    b.total_samples = total
    b.samples_in_batch = b.batch_size  # batch exhausted
    update_goal_region(b, params, t_max=INF)
    assert b.batch_size == batch_size
    assert b.batch_probability == pytest.approx(batch_probability)
    assert b.samples_in_batch == 0


def test_update_noop_while_batch_open_or_time_bounded():
    params = ExpansionParams(initial_batch_size=10)
    b = initialize_bound_variables(params, dim=1)
    b.samples_in_batch = 9
    b.total_samples = 9
    update_goal_region(b, params, t_max=INF)
    assert b.batch_size == 10 and b.new_time_range == 2.0  # untouched

    b.samples_in_batch = 10
    update_goal_region(b, params, t_max=25.0)  # bounded: expansion disabled
    assert b.batch_size == 10 and b.new_time_range == 2.0
    assert b.batch_probability == 1.0


def test_window_grows_geometrically():
    params = ExpansionParams(range_factor=2.0, initial_batch_size=1)
    b = initialize_bound_variables(params, dim=1)
    windows = [(b.time_range, b.new_time_range)]
    for total in (1, 2, 3):
        b.total_samples = total
        b.samples_in_batch = b.batch_size
        update_goal_region(b, params, t_max=INF)
        windows.append((b.time_range, b.new_time_range))
    # the first firing leaves time_range at its initial value
    assert windows == [(2.0, 2.0), (2.0, 4.0), (4.0, 8.0), (8.0, 16.0)]


def test_update_absorbs_new_goals():
    params = ExpansionParams(initial_batch_size=1)
    b = initialize_bound_variables(params, dim=1)
    b.goals.add(np.array([0.9]), 1.0)
    b.new_goals.add(np.array([0.9]), 3.0)
    b.new_goals.add(np.array([0.9]), 5.0)
    b.total_samples = 3
    b.samples_in_batch = 1
    update_goal_region(b, params, t_max=INF)
    assert len(b.goals) == 3 and len(b.new_goals) == 0
    assert sorted(b.goals.t.tolist()) == [1.0, 3.0, 5.0]


def test_goal_set_keep_before():
    g = GoalSet(dim=1)
    for t in (1.0, 4.0, 2.0, 8.0):
        g.add(np.array([0.9]), t)
    assert g.keep_before(4.0) == 2
    assert sorted(g.t.tolist()) == [1.0, 2.0]
    assert g.keep_before(4.0) == 0


def test_sample_goal_bounded_window():
    scn = open_corridor(t_max=5.0)
    params = ExpansionParams()
    b = initialize_bound_variables(params, dim=1)
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = sample_goal(scn, b, t_max=5.0, rng=rng, time_floor=1e-4)
        assert x is not None
        assert x.q[0] == 0.9
        assert 0.8 <= x.t < 5.0  # earliest arrival is |0.9-0.1|/1
    assert len(b.goals) == 200 and len(b.new_goals) == 0


def test_sample_goal_bounded_empty_window():
    scn = open_corridor(t_max=0.5)  # below the earliest possible arrival
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    rng = np.random.default_rng(0)
    assert sample_goal(scn, b, t_max=0.5, rng=rng, time_floor=1e-4) is None
    assert len(b.goals) == 0


def test_sample_goal_unbounded_windows_and_routing():
    scn = open_corridor()
    b = initialize_bound_variables(ExpansionParams(range_factor=2.0), dim=1)
    b.time_range, b.new_time_range = 2.0, 4.0
    b.batch_probability = 0.25
    rng = np.random.default_rng(1)
    old, new = 0, 0
    for _ in range(2000):
        x = sample_goal(scn, b, t_max=INF, rng=rng, time_floor=1e-4)
        assert x is not None
        if x.t < 0.8 * 2.0:
            old += 1
        else:
            assert x.t < 0.8 * 4.0
            new += 1
    # routing matches the window split and the batch probability
    assert len(b.goals) >= old and len(b.new_goals) == 2000 - len(b.goals)
    assert 0.15 < len(b.goals) / 2000 < 0.35
    assert np.all(b.new_goals.t >= 0.8 * 2.0)


def test_sample_goal_unweighted_uses_whole_window():
    scn = open_corridor()
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    b.time_range, b.new_time_range = 2.0, 4.0
    b.batch_probability = 0.25
    rng = np.random.default_rng(2)
    ts = []
    for _ in range(2000):
        x = sample_goal(scn, b, t_max=INF, rng=rng, time_floor=1e-4, weighted=False)
        assert x is not None
        ts.append(x.t)
    ts = np.array(ts)
    assert ts.min() >= 0.8 and ts.max() < 0.8 * 4.0
    # uniform over the whole window: ~37.5% of mass below time_range * base
    frac_old = np.mean(ts < 0.8 * 2.0)
    assert 0.30 < frac_old < 0.45
    assert len(b.new_goals) == 0  # unweighted mode never routes to the new set


def test_sample_goal_time_floor_keeps_window_alive():
    # start sits on the goal: earliest arrival is 0, so the multiplicative
    # window collapses unless the floor props it open
    scn = open_corridor(start_q=0.9)
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    rng = np.random.default_rng(0)
    x = sample_goal(scn, b, t_max=INF, rng=rng, time_floor=1e-3)
    assert x is not None
    assert 0.0 < x.t < 1e-3 * 2.0


def test_sample_goal_rejects_colliding_states():
    # goal configuration permanently blocked
    scn = Scenario(
        space=SpaceTimeSpace([0.0], [1.0], [1.0]),
        start=SpaceTimeState([0.1], 0.0),
        goal=GoalRegion(q_set=(np.array([0.9]),)),
        box_obstacles=(BoxObstacle([0.85], [0.95]),),
    )
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert sample_goal(scn, b, t_max=INF, rng=rng, time_floor=1e-4) is None
    assert len(b.goals) == 0 and len(b.new_goals) == 0


def test_sample_goal_narrow_passage_windows():
    # the wall blocks nothing at the goal configuration, so sampling succeeds
    scn = make_narrow_passage()
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    rng = np.random.default_rng(3)
    x = sample_goal(scn, b, t_max=INF, rng=rng, time_floor=1e-4)
    assert x is not None and x.q[0] == 0.9


def test_sample_conditionally_requires_goals():
    scn = open_corridor()
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    rng = np.random.default_rng(0)
    assert sample_conditionally(scn, b, rng) is None


def test_sample_conditionally_reachability_invariants():
    scn = Scenario(
        space=SpaceTimeSpace([0.0, 0.0], [1.0, 1.0], [1.0, 0.5]),
        start=SpaceTimeState([0.1, 0.1], 0.0),
        goal=GoalRegion(q_set=(np.array([0.9, 0.9]),)),
    )
    b = initialize_bound_variables(ExpansionParams(), dim=2)
    rng = np.random.default_rng(4)
    for _ in range(40):
        sample_goal(scn, b, t_max=INF, rng=rng, time_floor=1e-4)
    b.time_range, b.new_time_range = 2.0, 4.0
    b.batch_probability = 0.5
    for _ in range(20):
        sample_goal(scn, b, t_max=INF, rng=rng, time_floor=1e-4)
    assert len(b.goals) > 0 and len(b.new_goals) > 0
    goals = b.goals.states() + b.new_goals.states()
    for _ in range(1000):
        x = sample_conditionally(scn, b, rng)
        assert x is not None
        # reachable from the start, and some stored goal remains reachable
        assert math.isfinite(distance(scn.start, x, scn.space))
        assert any(math.isfinite(distance(x, g, scn.space)) for g in goals)


def test_sample_conditionally_weights_split_bands():
    scn = open_corridor()
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    b.goals.add(np.array([0.9]), 2.0)
    b.new_goals.add(np.array([0.9]), 6.0)
    b.batch_probability = 0.5
    rng = np.random.default_rng(5)
    in_old_band = 0
    for _ in range(2000):
        x = sample_conditionally(scn, b, rng)
        assert x is not None
        t_lb = lower_bound_arrival_time(scn.start.q, x.q, scn.space)
        mvt_old = 2.0 - abs(0.9 - x.q[0])
        mvt_new = 6.0 - abs(0.9 - x.q[0])
        assert x.t >= t_lb
        assert x.t < mvt_new
        if x.t < mvt_old:
            in_old_band += 1
    assert 0.2 < in_old_band / 2000.0  # both bands are exercised
    assert in_old_band < 2000


def test_sample_conditionally_gives_up_when_nothing_fits():
    # the only stored goal is earlier than anything reachable from the start
    scn = open_corridor()
    b = initialize_bound_variables(ExpansionParams(), dim=1)
    b.goals.add(np.array([0.9]), 0.1)  # unreachably early
    rng = np.random.default_rng(6)
    assert sample_conditionally(scn, b, rng, max_tries=50) is None

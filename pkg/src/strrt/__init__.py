"""Space-time motion planning with moving obstacles and unbounded arrival time."""

__version__ = "0.1.0"

from .baselines import BaselineParams, SpaceTimeRRTConnect, SpaceTimeRRTStar
from .planner import (
    ExpansionParams,
    ExpansionState,
    PlannerParams,
    STRRTStar,
    initialize_bound_variables,
    sample_conditionally,
    sample_goal,
    update_goal_region,
)
from .scenario import (
    BoxObstacle,
    ObstacleTrajectory,
    Scenario,
    ScenarioFormatError,
    SphereObstacle,
    load_scenario,
    load_scenario_file,
    make_cluttered,
    make_narrow_passage,
    save_scenario,
)
from .solution import Improvement, RunStats, SolutionPath
from .spacetime import (
    GoalRegion,
    SpaceTimeSpace,
    SpaceTimeState,
    distance,
    interpolate,
    lower_bound_arrival_time,
    max_valid_time,
)

__all__ = [
    "BaselineParams",
    "BoxObstacle",
    "ExpansionParams",
    "ExpansionState",
    "GoalRegion",
    "Improvement",
    "ObstacleTrajectory",
    "PlannerParams",
    "RunStats",
    "STRRTStar",
    "Scenario",
    "ScenarioFormatError",
    "SolutionPath",
    "SpaceTimeRRTConnect",
    "SpaceTimeRRTStar",
    "SpaceTimeSpace",
    "SpaceTimeState",
    "SphereObstacle",
    "distance",
    "initialize_bound_variables",
    "interpolate",
    "load_scenario",
    "load_scenario_file",
    "lower_bound_arrival_time",
    "make_cluttered",
    "make_narrow_passage",
    "max_valid_time",
    "sample_conditionally",
    "sample_goal",
    "save_scenario",
    "update_goal_region",
]

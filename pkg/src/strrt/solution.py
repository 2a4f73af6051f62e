"""Solution paths and per-run planner statistics."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .spacetime import SpaceTimeState


@dataclass(frozen=True, eq=False)
class SolutionPath:
    """A sequence of space-time states from start to goal; cost is the
    arrival time at the final state."""

    states: tuple[SpaceTimeState, ...]
    cost: float

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "cost", float(self.cost))
        if len(self.states) < 2:
            raise ValueError("a solution needs at least start and goal states")
        ts = [s.t for s in self.states]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("solution states must be ordered in time")
        if self.cost != ts[-1]:
            raise ValueError("solution cost must equal the final arrival time")

    def to_dict(self) -> dict:
        return {
            "states": [{"q": s.q.tolist(), "t": s.t} for s in self.states],
            "cost": self.cost,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @staticmethod
    def from_dict(doc: dict) -> "SolutionPath":
        states = tuple(SpaceTimeState(np.array(s["q"], dtype=float), s["t"]) for s in doc["states"])
        return SolutionPath(states, doc["cost"])

    @staticmethod
    def from_json(text: str | bytes) -> "SolutionPath":
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        return SolutionPath.from_dict(json.loads(text))


@dataclass(frozen=True)
class Improvement:
    """One strict decrease of the incumbent cost.

    `elapsed_s` is None when the run was iteration-bounded and wall time
    is deliberately excluded from outputs.
    """

    iteration: int
    elapsed_s: float | None
    cost: float


@dataclass
class RunStats:
    """Counters and the improvement history of a single planner run."""

    iterations: int = 0
    samples: int = 0
    nodes: int = 0
    rewires: int = 0
    prunes: int = 0
    improvements: list[Improvement] = field(default_factory=list)
    elapsed_s: float | None = None

    @property
    def first_solution(self) -> Improvement | None:
        return self.improvements[0] if self.improvements else None

    @property
    def final_cost(self) -> float:
        return self.improvements[-1].cost if self.improvements else math.inf

    def record(self, iteration: int, elapsed_s: float | None, cost: float):
        if self.improvements and not cost < self.improvements[-1].cost:
            raise ValueError("improvements must strictly decrease the cost")
        self.improvements.append(Improvement(iteration, elapsed_s, cost))

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "samples": self.samples,
            "nodes": self.nodes,
            "rewires": self.rewires,
            "prunes": self.prunes,
            "elapsed_s": self.elapsed_s,
            "final_cost": self.final_cost if self.improvements else None,
            "improvements": [
                {"iteration": im.iteration, "elapsed_s": im.elapsed_s, "cost": im.cost}
                for im in self.improvements
            ],
        }

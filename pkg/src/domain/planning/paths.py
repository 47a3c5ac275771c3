import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.domain.mapping.voxel_core import FloatArray


def _drop_repeats(points: FloatArray, tolerance: float = 1e-9) -> FloatArray:
    if len(points) < 2:
        return points
    keep = [0]
    for i in range(1, len(points)):
        if np.linalg.norm(points[i] - points[keep[-1]]) > tolerance:
            keep.append(i)
    return points[keep]


@dataclass
class WaypointPath:
    """Position waypoints; ``validated`` is False for raw skeleton output."""

    waypoints: FloatArray
    validated: bool = True

    @classmethod
    def from_points(
        cls, points: Sequence[Sequence[float]], validated: bool = True
    ) -> "WaypointPath":
        array = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        return cls(_drop_repeats(array), validated)

    @property
    def length(self) -> float:
        if len(self.waypoints) < 2:
            return 0.0
        steps = np.diff(self.waypoints, axis=0)
        return float(np.linalg.norm(steps, axis=1).sum())

    def __len__(self) -> int:
        return len(self.waypoints)


@dataclass
class PlanResult:
    success: bool
    path: Optional[WaypointPath] = None
    plan_time_s: float = 0.0
    iterations: int = 0
    raw_path: Optional[WaypointPath] = None
    message: str = ""

    @property
    def length(self) -> float:
        return self.path.length if self.path is not None else 0.0


@dataclass(frozen=True)
class PlanningBudget:
    seconds: Optional[float] = None
    iterations: Optional[int] = None

    @classmethod
    def from_seconds(
        cls, seconds: float, deterministic: bool, iterations_per_second: int
    ) -> "PlanningBudget":
        if deterministic:
            return cls(iterations=max(1, int(seconds * iterations_per_second)))
        return cls(seconds=seconds)

    def clock(self) -> "BudgetClock":
        return BudgetClock(self)


@dataclass
class BudgetClock:
    budget: PlanningBudget
    count: int = 0
    started: float = field(default_factory=time.perf_counter)

    @property
    def exhausted(self) -> bool:
        if (
            self.budget.iterations is not None
            and self.count >= self.budget.iterations
        ):
            return True
        if self.budget.seconds is not None:
            return time.perf_counter() - self.started >= self.budget.seconds
        return self.budget.iterations is None

    def tick(self) -> bool:
        """Consume one iteration; False once the budget is spent."""
        if self.exhausted:
            return False
        self.count += 1
        return True

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.started

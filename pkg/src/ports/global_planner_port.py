from abc import ABC, abstractmethod
from typing import Optional, Sequence

from src.domain.planning.paths import PlanningBudget, PlanResult


class GlobalPlannerPort(ABC):
    name: str = ""

    @abstractmethod
    def plan(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
        seed: Optional[int] = None,
    ) -> PlanResult:
        raise NotImplementedError

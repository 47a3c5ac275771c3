import logging
from typing import Optional, Sequence

from src.common.dto import PlannerConfig
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget, PlanResult
from src.domain.planning.sampling_planners import plan_straight_line
from src.domain.topology.sparse_graph import SparseGraph
from src.ports.global_planner_port import GlobalPlannerPort

logger = logging.getLogger()


class StraightLinePlannerAdapter(GlobalPlannerPort):
    """Baseline that only succeeds when start sees goal."""

    name = "none"

    def __init__(
        self,
        checker: CollisionChecker,
        config: PlannerConfig,
        graph: Optional[SparseGraph] = None,
        roadmap_budget: Optional[PlanningBudget] = None,
    ) -> None:
        self.checker = checker
        self.config = config

    def plan(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
        seed: Optional[int] = None,
    ) -> PlanResult:
        return plan_straight_line(self.checker, start, goal)

import logging
from typing import Optional, Sequence

from src.common.dto import PlannerConfig
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget, PlanResult
from src.domain.planning.sampling_planners import plan_rrt_connect
from src.domain.topology.sparse_graph import SparseGraph
from src.ports.global_planner_port import GlobalPlannerPort

logger = logging.getLogger()


class RrtConnectPlannerAdapter(GlobalPlannerPort):
    name = "rrt_connect"

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
        result = plan_rrt_connect(
            self.checker, start, goal, budget, seed or 0, self.config
        )
        logger.debug(
            f"RRT-Connect: {result.success} after {result.iterations} iterations"
        )
        return result

import logging
from typing import Optional, Sequence

from src.common.dto import PlannerConfig
from src.domain.exceptions import PlanningFailedException
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget, PlanResult
from src.domain.planning.skeleton_planner import SkeletonPlanner
from src.domain.topology.sparse_graph import SparseGraph
from src.ports.global_planner_port import GlobalPlannerPort

logger = logging.getLogger()


class SkeletonPlannerAdapter(GlobalPlannerPort):
    name = "skeleton"

    def __init__(
        self,
        checker: CollisionChecker,
        config: PlannerConfig,
        graph: Optional[SparseGraph] = None,
        roadmap_budget: Optional[PlanningBudget] = None,
    ) -> None:
        if graph is None:
            raise PlanningFailedException("the skeleton planner needs a sparse graph")
        self.planner = SkeletonPlanner(
            graph,
            checker,
            nearest=config.skeleton_nearest,
            max_expansions=config.grid_max_expansions,
        )

    def plan(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
        seed: Optional[int] = None,
    ) -> PlanResult:
        return self.planner.plan(start, goal)

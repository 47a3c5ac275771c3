import logging
import time
from typing import Optional, Sequence

from src.common.dto import PlannerConfig
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget, PlanResult
from src.domain.planning.sampling_planners import ProbabilisticRoadmap
from src.domain.topology.sparse_graph import SparseGraph
from src.ports.global_planner_port import GlobalPlannerPort

logger = logging.getLogger()


class PrmPlannerAdapter(GlobalPlannerPort):
    """Roadmap built on the first query and reused by later ones.

    ``plan_time_s`` of the first result includes the roadmap build time.
    """

    name = "prm"

    def __init__(
        self,
        checker: CollisionChecker,
        config: PlannerConfig,
        graph: Optional[SparseGraph] = None,
        roadmap_budget: Optional[PlanningBudget] = None,
    ) -> None:
        self.checker = checker
        self.config = config
        self.roadmap_budget = roadmap_budget or PlanningBudget(seconds=2.0)
        self.roadmap: Optional[ProbabilisticRoadmap] = None
        self.build_time_s = 0.0

    def plan(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
        seed: Optional[int] = None,
    ) -> PlanResult:
        build_time = 0.0
        if self.roadmap is None:
            started = time.perf_counter()
            self.roadmap = ProbabilisticRoadmap(self.checker, self.config, seed or 0)
            self.roadmap.build(self.roadmap_budget)
            build_time = self.build_time_s = time.perf_counter() - started
        result = self.roadmap.query(start, goal, budget)
        result.plan_time_s += build_time
        return result

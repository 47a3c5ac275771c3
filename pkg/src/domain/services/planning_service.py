import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence, cast

from src.common.dto import LocoConfig, PlannerConfig, SmoothingConfig
from src.domain.exceptions import (
    IllConditionedTimesException,
    PlanningFailedException,
    SmoothingFailedException,
)
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget, PlanResult
from src.domain.topology.sparse_graph import SparseGraph
from src.domain.trajectory.audit import DistanceField
from src.domain.trajectory.polynomial import Trajectory
from src.ports.global_planner_port import GlobalPlannerPort
from src.ports.path_smoother_port import PathSmootherPort
from src.utils.module import Modules

logger = logging.getLogger()


def normalize_name(name: str) -> str:
    return name.strip().lower().replace("-", "_")


def load_planner(
    name: str,
    checker: CollisionChecker,
    config: PlannerConfig,
    graph: Optional[SparseGraph] = None,
    roadmap_budget: Optional[PlanningBudget] = None,
) -> GlobalPlannerPort:
    return cast(
        GlobalPlannerPort,
        Modules.get_class_default_instance(
            f"planner.{normalize_name(name)}",
            checker,
            config,
            graph=graph,
            roadmap_budget=roadmap_budget,
        ),
    )


def load_smoother(
    name: str,
    field: DistanceField,
    smoothing: SmoothingConfig,
    loco: LocoConfig,
) -> PathSmootherPort:
    aliases = {"polynomial": "poly"}
    key = normalize_name(name)
    return cast(
        PathSmootherPort,
        Modules.get_class_default_instance(
            f"smoother.{aliases.get(key, key)}", field, smoothing, loco
        ),
    )


@dataclass
class PlanAndSmoothResult:
    plan: PlanResult
    trajectory: Optional[Trajectory] = None
    smooth_time_s: float = 0.0
    message: str = ""

    @property
    def success(self) -> bool:
        return self.plan.success and self.trajectory is not None


class PlanningService:
    def __init__(
        self,
        planner: GlobalPlannerPort,
        smoother: Optional[PathSmootherPort] = None,
    ) -> None:
        self.__planner = planner
        self.__smoother = smoother

    def plan(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
        seed: Optional[int] = None,
    ) -> PlanResult:
        try:
            result = self.__planner.plan(start, goal, budget, seed)
        except PlanningFailedException as error:
            logger.info(f"{self.__planner.name} failed: {error}")
            return PlanResult(False, message=str(error))
        logger.debug(
            f"{self.__planner.name}: success={result.success} "
            f"length={result.length:.2f}m time={result.plan_time_s:.3f}s"
        )
        return result

    def plan_and_smooth(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
        seed: Optional[int] = None,
    ) -> PlanAndSmoothResult:
        return self.smooth_plan(self.plan(start, goal, budget, seed))

    def smooth_plan(self, result: PlanResult) -> PlanAndSmoothResult:
        if not result.success or result.path is None or self.__smoother is None:
            return PlanAndSmoothResult(result, message=result.message)
        started = time.perf_counter()
        try:
            trajectory = self.__smoother.smooth(result.path)
        except (SmoothingFailedException, IllConditionedTimesException) as error:
            elapsed = time.perf_counter() - started
            logger.debug(f"{self.__smoother.name} failed: {error}")
            return PlanAndSmoothResult(result, None, elapsed, str(error))
        return PlanAndSmoothResult(
            result, trajectory, time.perf_counter() - started
        )

import logging
import time
from typing import List, Optional, Sequence

import numpy as np

from src.domain.mapping.voxel_core import (
    FloatArray,
    index_to_center,
    point_to_index,
)
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.grid_search import grid_astar
from src.domain.planning.paths import PlanResult, WaypointPath

logger = logging.getLogger()


def astar_esdf(
    checker: CollisionChecker,
    start: Sequence[float],
    goal: Sequence[float],
    max_expansions: int,
) -> PlanResult:
    """Grid A* between the voxels holding start and goal.

    Interior waypoints are voxel centers; the exact start and goal points
    replace the end centers when they are motion-valid to their neighbors.
    """
    started = time.perf_counter()
    vs = checker.voxel_size
    found = grid_astar(
        point_to_index(start, vs),
        point_to_index(goal, vs),
        checker.is_index_traversable,
        max_expansions,
        checker.is_step_valid,
    )
    elapsed = time.perf_counter() - started
    if found is None:
        return PlanResult(False, plan_time_s=elapsed, message="no grid path")

    indices, _ = found
    centers = [index_to_center(index, vs) for index in indices]
    points = _attach_endpoints(
        checker,
        np.asarray(start, dtype=np.float64),
        np.asarray(goal, dtype=np.float64),
        centers,
    )
    if points is None:
        return PlanResult(False, plan_time_s=elapsed, message="endpoints blocked")
    return PlanResult(
        True,
        WaypointPath.from_points(points),
        plan_time_s=elapsed,
        iterations=len(indices),
    )


def _attach_endpoints(
    checker: CollisionChecker,
    start: FloatArray,
    goal: FloatArray,
    centers: List[FloatArray],
) -> Optional[List[FloatArray]]:
    if len(centers) == 1:
        if checker.is_motion_valid(start, goal):
            return [start, goal]
        if checker.is_motion_valid(start, centers[0]) and checker.is_motion_valid(
            centers[0], goal
        ):
            return [start, centers[0], goal]
        return None
    head = [start] if checker.is_motion_valid(start, centers[0]) else None
    tail = [goal] if checker.is_motion_valid(centers[-1], goal) else None
    if head is None or tail is None:
        return None
    return head + centers + tail

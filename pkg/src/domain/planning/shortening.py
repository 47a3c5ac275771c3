"""Binary-search waypoint shortcutting."""

import logging
from typing import List

import numpy as np

from src.domain.exceptions import PlanningFailedException
from src.domain.mapping.voxel_core import FloatArray, index_to_center, point_to_index
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.grid_search import grid_astar
from src.domain.planning.paths import WaypointPath

logger = logging.getLogger()


def _repair(
    checker: CollisionChecker, points: FloatArray, max_expansions: int
) -> FloatArray:
    repaired: List[FloatArray] = [points[0]]
    vs = checker.voxel_size
    for a, b in zip(points[:-1], points[1:]):
        if checker.is_motion_valid(a, b):
            repaired.append(b)
            continue
        found = grid_astar(
            point_to_index(a, vs),
            point_to_index(b, vs),
            checker.is_index_traversable,
            max_expansions,
            checker.is_step_valid,
        )
        if found is None:
            raise PlanningFailedException(
                f"Cannot repair segment {a.tolist()} -> {b.tolist()}"
            )
        centers = [index_to_center(index, vs) for index in found[0]]
        if not checker.is_motion_valid(a, centers[0]) or not (
            checker.is_motion_valid(centers[-1], b)
        ):
            raise PlanningFailedException("Segment endpoints are not reachable")
        repaired.extend(centers)
        repaired.append(b)
    return WaypointPath.from_points(repaired).waypoints


def _shortcut(
    checker: CollisionChecker, points: FloatArray, lo: int, hi: int
) -> List[int]:
    if hi - lo <= 1 or checker.is_motion_valid(points[lo], points[hi]):
        return [lo, hi]
    mid = (lo + hi) // 2
    left = _shortcut(checker, points, lo, mid)
    right = _shortcut(checker, points, mid, hi)
    return left + right[1:]


def shorten_path(
    checker: CollisionChecker, path: WaypointPath, max_expansions: int = 500_000
) -> WaypointPath:
    points = np.asarray(path.waypoints, dtype=np.float64)
    if len(points) < 2:
        return WaypointPath(points.copy(), validated=True)
    points = _repair(checker, points, max_expansions)

    while len(points) > 2:
        kept = _shortcut(checker, points, 0, len(points) - 1)
        if len(kept) == len(points):
            break
        points = points[kept]
    logger.debug(f"Shortened {len(path)} waypoints to {len(points)}")
    return WaypointPath(points, validated=True)

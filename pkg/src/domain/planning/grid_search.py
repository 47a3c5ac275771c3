import heapq
import itertools
import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

from src.domain.mapping.voxel_core import GridIndex, neighbors26

logger = logging.getLogger()

NodeTest = Callable[[GridIndex], bool]
StepTest = Callable[[GridIndex, GridIndex], bool]


def _heuristic(a: GridIndex, b: GridIndex) -> float:
    return math.sqrt(
        (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2
    )


def grid_astar(
    start: GridIndex,
    goal: GridIndex,
    traversable: NodeTest,
    max_expansions: int,
    step_valid: Optional[StepTest] = None,
) -> Optional[Tuple[List[GridIndex], float]]:
    """26-connected A* in grid units; returns (indices, cost) or None.

    The Euclidean heuristic is admissible and consistent for 26-connected
    unit steps, so the first time the goal is popped its cost is optimal.
    """
    if not traversable(start) or not traversable(goal):
        return None
    if start == goal:
        return [start], 0.0

    counter = itertools.count()
    frontier: List[Tuple[float, int, GridIndex]] = [
        (_heuristic(start, goal), next(counter), start)
    ]
    cost_so_far: Dict[GridIndex, float] = {start: 0.0}
    came_from: Dict[GridIndex, GridIndex] = {}
    closed = set()
    expansions = 0

    while frontier:
        _, _, current = heapq.heappop(frontier)
        if current in closed:
            continue
        if current == goal:
            path = [current]
            while current in came_from:
                current = came_from[current]
                path.append(current)
            path.reverse()
            return path, cost_so_far[goal]
        closed.add(current)
        expansions += 1
        if expansions > max_expansions:
            logger.warning(f"Grid search hit the expansion cap {max_expansions}")
            return None

        for neighbor, offset in neighbors26(current):
            if neighbor in closed or not traversable(neighbor):
                continue
            if step_valid is not None and not step_valid(current, neighbor):
                continue
            new_cost = cost_so_far[current] + offset.grid_distance
            if new_cost < cost_so_far.get(neighbor, math.inf):
                cost_so_far[neighbor] = new_cost
                came_from[neighbor] = current
                priority = new_cost + _heuristic(neighbor, goal)
                heapq.heappush(frontier, (priority, next(counter), neighbor))
    return None

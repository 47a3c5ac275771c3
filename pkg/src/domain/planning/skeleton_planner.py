import logging
import time
from typing import Dict, List, Optional, Sequence

import networkx as nx
import numpy as np

from src.domain.exceptions import PlanningFailedException
from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.grid_planner import astar_esdf
from src.domain.planning.paths import PlanResult, WaypointPath
from src.domain.planning.shortening import shorten_path
from src.domain.topology.sparse_graph import SparseGraph

logger = logging.getLogger()


class SkeletonPlanner:
    """Graph search over a sparse skeleton graph.

    Start and goal join the graph at one of their k nearest vertices,
    by a straight segment when one is motion-valid and by grid A* in the
    distance field otherwise.
    """

    def __init__(
        self,
        graph: SparseGraph,
        checker: CollisionChecker,
        nearest: int = 5,
        max_expansions: int = 500_000,
    ) -> None:
        if graph.vertex_count == 0:
            raise PlanningFailedException("skeleton graph is empty")
        self.graph = graph
        self.checker = checker
        self.nearest = nearest
        self.max_expansions = max_expansions

    def _links(self, point: FloatArray) -> Dict[int, List[FloatArray]]:
        """Vertex id -> polyline from point to the vertex."""
        candidates = self.graph.nearest(point, self.nearest)
        links: Dict[int, List[FloatArray]] = {}
        for vertex in candidates:
            position = self.graph.position(vertex)
            if self.checker.is_motion_valid(point, position):
                links[vertex] = [point, position]
        if links:
            return links
        for vertex in candidates:
            found = astar_esdf(
                self.checker, point, self.graph.position(vertex), self.max_expansions
            )
            if found.success and found.path is not None:
                links[vertex] = list(found.path.waypoints)
                break
        return links

    def _heuristic(self, u: int, v: int) -> float:
        return float(np.linalg.norm(self.graph.position(u) - self.graph.position(v)))

    def _graph_chain(self, a: int, b: int) -> Optional[List[int]]:
        try:
            return list(
                nx.astar_path(self.graph.graph, a, b, self._heuristic, weight="length")
            )
        except nx.NetworkXNoPath:
            return None

    def plan(self, start: Sequence[float], goal: Sequence[float]) -> PlanResult:
        started = time.perf_counter()
        a = np.asarray(start, dtype=np.float64)
        b = np.asarray(goal, dtype=np.float64)
        if not self.checker.is_state_valid(a) or not self.checker.is_state_valid(b):
            elapsed = time.perf_counter() - started
            return PlanResult(False, plan_time_s=elapsed, message="invalid endpoint")
        entries = self._links(a)
        exits = self._links(b)
        best: Optional[WaypointPath] = None
        for entry, head in entries.items():
            for exit_, tail in exits.items():
                chain = self._graph_chain(entry, exit_)
                if chain is None:
                    continue
                vertices = [self.graph.position(v) for v in chain[1:-1]]
                points = head + vertices + tail[::-1]
                candidate = WaypointPath.from_points(points, validated=False)
                if best is None or candidate.length < best.length:
                    best = candidate
        if best is None:
            return PlanResult(
                False,
                plan_time_s=time.perf_counter() - started,
                message="start or goal not connectable to a common subgraph",
            )
        try:
            shortened = shorten_path(self.checker, best, self.max_expansions)
        except PlanningFailedException as error:
            return PlanResult(
                False,
                plan_time_s=time.perf_counter() - started,
                raw_path=best,
                message=str(error),
            )
        return PlanResult(
            True,
            shortened,
            plan_time_s=time.perf_counter() - started,
            raw_path=best,
        )


def plan_skeleton(
    graph: SparseGraph,
    checker: CollisionChecker,
    start: Sequence[float],
    goal: Sequence[float],
    nearest: int = 5,
    max_expansions: int = 500_000,
) -> PlanResult:
    return SkeletonPlanner(graph, checker, nearest, max_expansions).plan(start, goal)

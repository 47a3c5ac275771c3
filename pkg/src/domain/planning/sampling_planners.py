"""RRT-Connect, RRT* and PRM over a collision checker.

Samples are drawn uniformly in the observed bounding box. All randomness
comes from a seeded generator, so a fixed seed and an iteration budget
replay the same path.
"""

import logging
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.common.dto import PlannerConfig
from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget, PlanResult, WaypointPath

logger = logging.getLogger()

_SAME_POINT = 1e-9


class _Tree:
    def __init__(self, root: FloatArray) -> None:
        self._points = np.zeros((64, 3))
        self._points[0] = root
        self.size = 1
        self.parents: List[int] = [-1]
        self.costs: List[float] = [0.0]
        self.children: List[List[int]] = [[]]

    @property
    def points(self) -> FloatArray:
        return self._points[: self.size]

    def add(self, point: FloatArray, parent: int, cost: float) -> int:
        if self.size == len(self._points):
            self._points = np.vstack([self._points, np.zeros_like(self._points)])
        self._points[self.size] = point
        self.parents.append(parent)
        self.costs.append(cost)
        self.children.append([])
        self.children[parent].append(self.size)
        self.size += 1
        return self.size - 1

    def nearest(self, point: FloatArray) -> int:
        return int(np.argmin(np.sum((self.points - point) ** 2, axis=1)))

    def within(self, point: FloatArray, radius: float) -> List[int]:
        d2 = np.sum((self.points - point) ** 2, axis=1)
        return [int(i) for i in np.flatnonzero(d2 <= radius * radius)]

    def reparent(self, node: int, parent: int, cost: float) -> None:
        self.children[self.parents[node]].remove(node)
        self.parents[node] = parent
        self.children[parent].append(node)
        delta = cost - self.costs[node]
        stack = [node]
        while stack:
            current = stack.pop()
            self.costs[current] += delta
            stack.extend(self.children[current])

    def branch(self, node: int) -> List[FloatArray]:
        chain = []
        while node != -1:
            chain.append(self.points[node].copy())
            node = self.parents[node]
        return chain[::-1]


def _steer(source: FloatArray, target: FloatArray, step: float) -> FloatArray:
    offset = target - source
    distance = float(np.linalg.norm(offset))
    if distance <= step:
        return target.copy()
    return source + offset * (step / distance)  # type: ignore[no-any-return]


class _Sampler:
    def __init__(self, checker: CollisionChecker, seed: int) -> None:
        self.lower, self.upper = checker.bounds()
        self.rng = np.random.default_rng(seed)

    def sample(self) -> FloatArray:
        return self.rng.uniform(self.lower, self.upper)  # type: ignore[no-any-return]


def _endpoints_valid(
    checker: CollisionChecker, start: FloatArray, goal: FloatArray
) -> Optional[str]:
    if not checker.is_state_valid(start):
        return "invalid start"
    if not checker.is_state_valid(goal):
        return "invalid goal"
    return None


def plan_straight_line(
    checker: CollisionChecker, start: Sequence[float], goal: Sequence[float]
) -> PlanResult:
    started = time.perf_counter()
    a = np.asarray(start, dtype=np.float64)
    b = np.asarray(goal, dtype=np.float64)
    success = checker.is_state_valid(a) and checker.is_motion_valid(a, b)
    return PlanResult(
        success,
        WaypointPath.from_points([a, b], validated=success),
        plan_time_s=time.perf_counter() - started,
        message="" if success else "straight line blocked",
    )


def _trivial(
    checker: CollisionChecker, start: FloatArray, goal: FloatArray, started: float
) -> Optional[PlanResult]:
    problem = _endpoints_valid(checker, start, goal)
    if problem is not None:
        elapsed = time.perf_counter() - started
        return PlanResult(False, plan_time_s=elapsed, message=problem)
    if np.linalg.norm(goal - start) <= _SAME_POINT:
        return PlanResult(
            True, WaypointPath.from_points([start]), time.perf_counter() - started
        )
    if checker.is_motion_valid(start, goal):
        return PlanResult(
            True, WaypointPath.from_points([start, goal]), time.perf_counter() - started
        )
    return None


def plan_rrt_connect(
    checker: CollisionChecker,
    start: Sequence[float],
    goal: Sequence[float],
    budget: PlanningBudget,
    seed: int,
    config: PlannerConfig,
) -> PlanResult:
    """Bidirectional RRT; returns the first connection found."""
    started = time.perf_counter()
    a = np.asarray(start, dtype=np.float64)
    b = np.asarray(goal, dtype=np.float64)
    trivial = _trivial(checker, a, b, started)
    if trivial is not None:
        return trivial

    step = config.steer_voxels * checker.voxel_size
    sampler = _Sampler(checker, seed)
    trees = (_Tree(a), _Tree(b))
    clock = budget.clock()

    def extend(tree: _Tree, target: FloatArray) -> Optional[int]:
        near = tree.nearest(target)
        new = _steer(tree.points[near], target, step)
        if not checker.is_motion_valid(tree.points[near], new):
            return None
        return tree.add(new, near, 0.0)

    growing, other = 0, 1
    while clock.tick():
        node = extend(trees[growing], sampler.sample())
        if node is not None:
            target = trees[growing].points[node]
            reached = None
            while True:
                extended = extend(trees[other], target)
                if extended is None:
                    break
                gap = trees[other].points[extended] - target
                if np.linalg.norm(gap) <= _SAME_POINT:
                    reached = extended
                    break
            if reached is not None:
                head = trees[growing].branch(node)
                tail = trees[other].branch(reached)[::-1][1:]
                chain = head + tail if growing == 0 else (head + tail)[::-1]
                return PlanResult(
                    True,
                    WaypointPath.from_points(chain),
                    time.perf_counter() - started,
                    iterations=clock.count,
                )
        growing, other = other, growing
    return PlanResult(
        False,
        plan_time_s=time.perf_counter() - started,
        iterations=clock.count,
        message="budget exhausted",
    )


def plan_rrt_star(
    checker: CollisionChecker,
    start: Sequence[float],
    goal: Sequence[float],
    budget: PlanningBudget,
    seed: int,
    config: PlannerConfig,
) -> PlanResult:
    """Asymptotically optimal RRT with goal bias; best path at budget end."""
    started = time.perf_counter()
    a = np.asarray(start, dtype=np.float64)
    b = np.asarray(goal, dtype=np.float64)
    problem = _endpoints_valid(checker, a, b)
    if problem is not None:
        elapsed = time.perf_counter() - started
        return PlanResult(False, plan_time_s=elapsed, message=problem)
    if np.linalg.norm(b - a) <= _SAME_POINT:
        return PlanResult(
            True, WaypointPath.from_points([a]), time.perf_counter() - started
        )

    step = config.steer_voxels * checker.voxel_size
    sampler = _Sampler(checker, seed)
    tree = _Tree(a)
    goal_nodes: List[int] = []
    clock = budget.clock()
    while clock.tick():
        target = b if sampler.rng.random() < config.goal_bias else sampler.sample()
        near = tree.nearest(target)
        new = _steer(tree.points[near], target, step)
        if not checker.is_motion_valid(tree.points[near], new):
            continue
        n = tree.size + 1
        radius = min(
            config.rrt_star_gamma * step * (math.log(n) / n) ** (1.0 / 3.0), step
        )
        neighbours = tree.within(new, radius)
        parent = near
        cost = tree.costs[near] + float(np.linalg.norm(new - tree.points[near]))
        for candidate in neighbours:
            through = tree.costs[candidate] + float(
                np.linalg.norm(new - tree.points[candidate])
            )
            if through < cost - _SAME_POINT and checker.is_motion_valid(
                tree.points[candidate], new
            ):
                parent, cost = candidate, through
        node = tree.add(new, parent, cost)
        for candidate in neighbours:
            if candidate == parent:
                continue
            through = cost + float(np.linalg.norm(tree.points[candidate] - new))
            cheaper = through < tree.costs[candidate] - _SAME_POINT
            if cheaper and checker.is_motion_valid(new, tree.points[candidate]):
                tree.reparent(candidate, node, through)
        if np.linalg.norm(new - b) <= _SAME_POINT:
            goal_nodes.append(node)

    elapsed = time.perf_counter() - started
    if not goal_nodes:
        return PlanResult(
            False,
            plan_time_s=elapsed,
            iterations=clock.count,
            message="budget exhausted",
        )
    best = min(goal_nodes, key=lambda i: tree.costs[i])
    return PlanResult(
        True,
        WaypointPath.from_points(tree.branch(best)),
        elapsed,
        iterations=clock.count,
    )


class ProbabilisticRoadmap:
    """Roadmap built once per checker and reused across queries."""

    def __init__(
        self, checker: CollisionChecker, config: PlannerConfig, seed: int
    ) -> None:
        self.checker = checker
        self.config = config
        self.sampler = _Sampler(checker, seed)
        self.graph = nx.Graph()
        self._points = np.zeros((0, 3))
        self.built = False

    @property
    def node_count(self) -> int:
        return int(self.graph.number_of_nodes())

    def _connect(self, node: int, point: FloatArray, limit: int) -> None:
        if len(self._points) == 0:
            return
        d2 = np.sum((self._points - point) ** 2, axis=1)
        for other in np.argsort(d2, kind="stable")[:limit]:
            other = int(other)
            if other == node or self.graph.has_edge(node, other):
                continue
            if self.checker.is_motion_valid(point, self._points[other]):
                self.graph.add_edge(node, other, weight=float(np.sqrt(d2[other])))

    def _add_sample(self) -> bool:
        point = self.sampler.sample()
        if not self.checker.is_state_valid(point):
            return False
        node = len(self._points)
        self._points = np.vstack([self._points, point])
        self.graph.add_node(node, position=point)
        self._connect(node, point, self.config.prm_neighbors + 1)
        return True

    def build(self, budget: PlanningBudget) -> None:
        clock = budget.clock()
        while self.node_count < self.config.prm_roadmap_samples and clock.tick():
            self._add_sample()
        self.built = True
        logger.info(
            f"PRM roadmap: {self.node_count} nodes, "
            f"{self.graph.number_of_edges()} edges in {clock.elapsed:.3f}s"
        )

    def _heuristic(self, u: object, v: object) -> float:
        pu = self.graph.nodes[u]["position"]
        pv = self.graph.nodes[v]["position"]
        return float(np.linalg.norm(pu - pv))

    def _search(
        self, start: FloatArray, goal: FloatArray
    ) -> Optional[List[FloatArray]]:
        positions: Dict[object, FloatArray] = {"start": start, "goal": goal}
        for key, point in positions.items():
            self.graph.add_node(key, position=point)
            d2 = np.sum((self._points - point) ** 2, axis=1)
            for other in np.argsort(d2, kind="stable")[: self.config.prm_neighbors]:
                if self.checker.is_motion_valid(point, self._points[int(other)]):
                    weight = float(np.sqrt(d2[other]))
                    self.graph.add_edge(key, int(other), weight=weight)
        try:
            nodes = nx.astar_path(
                self.graph, "start", "goal", self._heuristic, weight="weight"
            )
            return [self.graph.nodes[n]["position"] for n in nodes]
        except nx.NetworkXNoPath:
            return None
        finally:
            self.graph.remove_nodes_from(["start", "goal"])

    def query(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
    ) -> PlanResult:
        started = time.perf_counter()
        a = np.asarray(start, dtype=np.float64)
        b = np.asarray(goal, dtype=np.float64)
        trivial = _trivial(self.checker, a, b, started)
        if trivial is not None:
            return trivial
        clock = budget.clock()
        chain = self._search(a, b)
        while chain is None and clock.tick():
            if self._add_sample():
                chain = self._search(a, b)
        elapsed = time.perf_counter() - started
        if chain is None:
            return PlanResult(
                False,
                plan_time_s=elapsed,
                iterations=clock.count,
                message="no roadmap path",
            )
        return PlanResult(
            True, WaypointPath.from_points(chain), elapsed, iterations=clock.count
        )


def plan_prm(
    checker: CollisionChecker,
    start: Sequence[float],
    goal: Sequence[float],
    roadmap_budget: PlanningBudget,
    query_budget: PlanningBudget,
    seed: int,
    config: PlannerConfig,
    roadmap: Optional[ProbabilisticRoadmap] = None,
) -> Tuple[PlanResult, ProbabilisticRoadmap]:
    if roadmap is None:
        roadmap = ProbabilisticRoadmap(checker, config, seed)
    if not roadmap.built:
        roadmap.build(roadmap_budget)
    return roadmap.query(start, goal, query_budget), roadmap

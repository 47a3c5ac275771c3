"""Multi-particle randomized walk toward a goal on the traversable grid."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.common.dto import ShotgunConfig
from src.domain.exceptions import InvalidStartException
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.mapping.voxel_core import (
    NEIGHBOR_OFFSETS,
    FloatArray,
    GridIndex,
    index_to_center,
    point_to_index,
)

logger = logging.getLogger()

_OFFSETS = np.array(sorted(NEIGHBOR_OFFSETS), dtype=np.int64)


@dataclass
class ShotgunResult:
    reached: bool
    best_point: FloatArray
    particle_path: List[FloatArray]
    particle: int
    iterations: int


class _Grid:
    def __init__(self, snapshot: DistanceSnapshot, robot_radius: float) -> None:
        self.snapshot = snapshot
        self.robot_radius = robot_radius

    def traversable(self, index: GridIndex) -> bool:
        value = self.snapshot.scalar_at(index)
        return value is not None and value >= self.robot_radius

    def moves(self, index: GridIndex) -> Tuple[List[GridIndex], FloatArray]:
        """Traversable neighbours in lexicographic offset order, with distances."""
        candidates = np.asarray(index, dtype=np.int64) + _OFFSETS
        values = self.snapshot.values_at_indices(candidates)
        with np.errstate(invalid="ignore"):
            keep = ~np.isnan(values) & (values >= self.robot_radius)
        neighbours = [
            (int(c[0]), int(c[1]), int(c[2])) for c in candidates[keep]
        ]
        return neighbours, values[keep]


def _goal_move(
    neighbours: List[GridIndex], goal: FloatArray, voxel_size: float
) -> GridIndex:
    centers = index_to_center(np.asarray(neighbours), voxel_size)
    distances = np.linalg.norm(centers - goal, axis=1)
    return neighbours[int(np.argmin(distances))]


def _walk(
    grid: _Grid,
    start: GridIndex,
    goal_index: GridIndex,
    goal: FloatArray,
    config: ShotgunConfig,
    rng: np.random.Generator,
    forced_goal: bool,
) -> Tuple[List[GridIndex], bool, int]:
    vs = grid.snapshot.voxel_size
    path = [start]
    previous: Optional[GridIndex] = None
    current = start
    probabilities = [config.p_goal, config.p_clearance, config.p_random]
    for step in range(1, config.max_iterations + 1):
        neighbours, values = grid.moves(current)
        if not neighbours:
            return path, False, step
        move = 0 if forced_goal else int(rng.choice(3, p=probabilities))
        if move == 0:
            following = _goal_move(neighbours, goal, vs)
        elif move == 1:
            following = neighbours[int(np.argmax(values))]
        else:
            options = [n for n in neighbours if n != previous] or neighbours
            following = options[int(rng.integers(len(options)))]
        previous, current = current, following
        path.append(current)
        if current == goal_index:
            return path, True, step
    return path, False, config.max_iterations


def shotgun_search(
    snapshot: DistanceSnapshot,
    start: Sequence[float],
    goal: Sequence[float],
    config: ShotgunConfig,
    robot_radius: float,
) -> ShotgunResult:
    """Walk particles from start; return the visited point closest to goal.

    Particle 0 always takes the goal-seeking move. The search stops as soon
    as any particle enters the goal voxel.
    """
    vs = snapshot.voxel_size
    start_point = np.asarray(start, dtype=np.float64)
    goal_point = np.asarray(goal, dtype=np.float64)
    grid = _Grid(snapshot, robot_radius)
    start_index = point_to_index(start_point, vs)
    if not grid.traversable(start_index):
        raise InvalidStartException(f"invalid start {start_point.tolist()}")
    goal_index = point_to_index(goal_point, vs)
    if start_index == goal_index:
        center = index_to_center(goal_index, vs)
        return ShotgunResult(True, center, [start_point, center], 0, 0)

    rng = np.random.default_rng(config.seed)
    best_distance = float(np.linalg.norm(goal_point - start_point))
    best_path: List[GridIndex] = []
    best_particle = 0
    total = 0
    reached = False
    for particle in range(config.n_particles):
        path, reached, steps = _walk(
            grid, start_index, goal_index, goal_point, config, rng, particle == 0
        )
        total += steps
        moved = path[1:]
        if not moved:
            continue
        centers = index_to_center(np.asarray(moved), vs)
        distances = np.linalg.norm(centers - goal_point, axis=1)
        closest = len(moved) - 1 if reached else int(np.argmin(distances))
        if reached or distances[closest] < best_distance:
            best_distance = float(distances[closest])
            best_path = moved[: closest + 1]
            best_particle = particle
        if reached:
            break

    particle_path = [start_point] + [index_to_center(i, vs) for i in best_path]
    logger.debug(
        f"Shotgun {'reached' if reached else 'stopped'} after {total} steps, "
        f"best distance {best_distance:.3f} m from particle {best_particle}"
    )
    return ShotgunResult(
        reached=reached,
        best_point=particle_path[-1],
        particle_path=particle_path,
        particle=best_particle,
        iterations=total,
    )

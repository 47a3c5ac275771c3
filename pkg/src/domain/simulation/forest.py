"""Poisson forest of vertical cylinders over a flat ground plane."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from src.common.dto import ForestConfig
from src.domain.mapping.voxel_core import FloatArray

logger = logging.getLogger()


@dataclass(frozen=True)
class Cylinder:
    x: float
    y: float
    radius: float
    height: float


@dataclass
class ForestWorld:
    config: ForestConfig
    density: float
    seed: int
    cylinders: List[Cylinder] = field(default_factory=list)

    @property
    def usable_area(self) -> float:
        width = max(self.config.extent_x - 2.0 * self.config.free_margin, 0.0)
        return width * self.config.extent_y

    def start_and_goal(self, height: float) -> Tuple[FloatArray, FloatArray]:
        """Centres of the two obstacle-free margins at the given height."""
        margin = self.config.free_margin
        mid_y = 0.5 * self.config.extent_y
        start = np.array([0.5 * margin, mid_y, height])
        goal = np.array([self.config.extent_x - 0.5 * margin, mid_y, height])
        return start, goal

    def centers(self) -> FloatArray:
        return np.array([[c.x, c.y] for c in self.cylinders], dtype=np.float64).reshape(
            -1, 2
        )

    def radii(self) -> FloatArray:
        return np.array([c.radius for c in self.cylinders], dtype=np.float64)

    def interpolate_many(self, points: FloatArray) -> Tuple[FloatArray, FloatArray]:
        """Exact signed distance to the nearest trunk or the ground, with gradient."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        values = points[:, 2].copy()
        gradients = np.zeros_like(points)
        gradients[:, 2] = 1.0
        if not self.cylinders:
            return values, gradients
        offsets = points[:, None, :2] - self.centers()[None, :, :]
        planar = np.linalg.norm(offsets, axis=2)
        surface = planar - self.radii()[None, :]
        nearest = np.argmin(surface, axis=1)
        rows = np.arange(len(points))
        trunk = surface[rows, nearest]
        closer = trunk < values
        values[closer] = trunk[closer]
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = offsets[rows, nearest] / planar[rows, nearest][:, None]
        direction = np.nan_to_num(direction)
        gradients[closer] = 0.0
        gradients[closer, :2] = direction[closer]
        return values, gradients

    def distance_at(self, point: FloatArray) -> float:
        values, _ = self.interpolate_many(np.asarray(point).reshape(1, 3))
        return float(values[0])


def generate_forest(density: float, config: ForestConfig, seed: int) -> ForestWorld:
    """Uniform trunk placement outside the free margins at the ends of x.

    The realised count is density times the usable area, rounded half up.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    if config.min_radius > config.max_radius:
        raise ValueError("min_radius must not exceed max_radius")
    world = ForestWorld(config=config, density=density, seed=seed)
    count = int(math.floor(density * world.usable_area + 0.5))
    rng = np.random.default_rng(seed)
    low = config.free_margin
    high = config.extent_x - config.free_margin
    for _ in range(count):
        world.cylinders.append(
            Cylinder(
                x=float(rng.uniform(low, high)),
                y=float(rng.uniform(0.0, config.extent_y)),
                radius=float(rng.uniform(config.min_radius, config.max_radius)),
                height=config.extent_z,
            )
        )
    logger.debug(
        f"Forest density {density} seed {seed}: {count} cylinders "
        f"over {world.usable_area:.1f} m^2"
    )
    return world

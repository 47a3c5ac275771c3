"""Pinhole depth camera with analytic ray casting against a forest world."""

import logging
import math
from typing import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from src.common.dto import CameraConfig
from src.domain.local.intermediate_goals import vertical_fov
from src.domain.mapping.tsdf_integrator import SensorScan
from src.domain.mapping.voxel_core import FloatArray
from src.domain.simulation.forest import ForestWorld

logger = logging.getLogger()


class SimCamera:
    """Forward-looking camera; sensor frame is x forward, y left, z up."""

    def __init__(self, config: CameraConfig) -> None:
        self.config = config
        self._directions = self._ray_directions()

    @property
    def vertical_fov(self) -> float:
        return vertical_fov(self.config)

    @property
    def ray_count(self) -> int:
        return len(self._directions)

    def _ray_directions(self) -> FloatArray:
        config = self.config
        half_fov = math.radians(config.horizontal_fov_deg) / 2
        focal = 0.5 * config.width / math.tan(half_fov)
        columns = np.arange(0, config.width, config.decimation) + 0.5
        rows = np.arange(0, config.height, config.decimation) + 0.5
        u, v = np.meshgrid(columns, rows, indexing="xy")
        directions = np.stack(
            [
                np.ones(u.size),
                -(u.ravel() - 0.5 * config.width) / focal,
                -(v.ravel() - 0.5 * config.height) / focal,
            ],
            axis=1,
        )
        return directions / np.linalg.norm(directions, axis=1)[:, None]  # type: ignore

    def ray_depths(
        self, world: ForestWorld, origin: FloatArray, directions: FloatArray
    ) -> FloatArray:
        """Distance to the first surface along each unit ray, inf for no hit."""
        depths = np.full(len(directions), np.inf)
        down = directions[:, 2] < 0
        if origin[2] > 0:
            depths[down] = -origin[2] / directions[down, 2]
        if not world.cylinders:
            return depths
        centers = world.centers()
        radii = world.radii()
        heights = np.array([c.height for c in world.cylinders])
        d_xy = directions[:, :2]
        a = np.sum(d_xy * d_xy, axis=1)[:, None]
        relative = origin[None, :2] - centers
        b = 2.0 * d_xy @ relative.T
        c = (np.sum(relative * relative, axis=1) - radii * radii)[None, :]
        discriminant = b * b - 4.0 * a * c
        with np.errstate(invalid="ignore", divide="ignore"):
            t = (-b - np.sqrt(discriminant)) / (2.0 * a)
        z = origin[2] + t * directions[:, 2:3]
        hit = (
            (discriminant >= 0)
            & (a > 1e-12)
            & (t > 0)
            & (c > 0)
            & (z >= 0)
            & (z <= heights[None, :])
        )
        t = np.where(hit, t, np.inf)
        return np.minimum(depths, t.min(axis=1))  # type: ignore[no-any-return]

    def render(
        self, world: ForestWorld, position: Sequence[float], yaw: float
    ) -> SensorScan:
        """Sensor-frame points; rays without a hit end at max range as clearing rays."""
        origin = np.asarray(position, dtype=np.float64)
        rotation = Rotation.from_euler("z", yaw)
        world_directions = rotation.apply(self._directions)
        depths = self.ray_depths(world, origin, world_directions)
        clearing = depths > self.config.max_range
        depths = np.where(clearing, self.config.max_range, depths)
        points = self._directions * depths[:, None]
        logger.debug(
            f"Rendered {len(points)} rays, {int(clearing.sum())} clearing, "
            f"from {origin.tolist()} yaw {yaw:.2f}"
        )
        return SensorScan(
            rotation=rotation,
            translation=origin,
            points=points,
            clearing=clearing,
        )

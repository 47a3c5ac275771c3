import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.common.dto import CollisionMode
from src.domain.mapping.distance_snapshot import BoolArray, DistanceSnapshot
from src.domain.mapping.voxel_core import (
    FloatArray,
    GridIndex,
    cast_ray,
    index_to_center,
    point_to_index,
)

logger = logging.getLogger()

_TOLERANCE = 1e-9


class CollisionChecker:
    """Robot-sphere validity over a frozen distance snapshot.

    ``esdf_point`` is pessimistic: unobserved space is invalid.
    ``tsdf_sphere`` is optimistic: only observed occupied voxels block.
    """

    def __init__(
        self,
        snapshot: DistanceSnapshot,
        robot_radius: float,
        mode: CollisionMode = CollisionMode.ESDF_POINT,
    ) -> None:
        self.snapshot = snapshot
        self.robot_radius = robot_radius
        self.mode = mode
        self._node_cache: Dict[GridIndex, bool] = {}
        self._step_cache: Dict[Tuple[GridIndex, GridIndex], bool] = {}

    @property
    def voxel_size(self) -> float:
        return self.snapshot.voxel_size

    def _blocked(self) -> BoolArray:
        return self.snapshot.occupied_within(self.robot_radius)

    def _sphere_blocked(self, index: GridIndex) -> bool:
        local = self.snapshot.local_index(index)
        if local is None:
            return False
        return bool(self._blocked()[local])

    def is_state_valid(self, p: Sequence[float]) -> bool:
        if self.mode == CollisionMode.TSDF_SPHERE:
            return not self._sphere_blocked(point_to_index(p, self.voxel_size))
        sample = self.snapshot.interpolate(p)
        if sample is None:
            return False
        return sample[0] >= self.robot_radius - _TOLERANCE

    def states_valid(self, points: FloatArray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.mode == CollisionMode.TSDF_SPHERE:
            return np.array([self.is_state_valid(p) for p in points])
        values, _ = self.snapshot.interpolate_many(points)
        with np.errstate(invalid="ignore"):
            return ~np.isnan(values) & (
                values >= self.robot_radius - _TOLERANCE
            )

    def is_motion_valid(self, a: Sequence[float], b: Sequence[float]) -> bool:
        start = np.asarray(a, dtype=np.float64)
        end = np.asarray(b, dtype=np.float64)
        if self.mode == CollisionMode.TSDF_SPHERE:
            return not any(
                self._sphere_blocked(index)
                for index in cast_ray(start, end, self.voxel_size)
            )
        length = float(np.linalg.norm(end - start))
        count = max(1, int(math.ceil(length / (0.5 * self.voxel_size))))
        t = np.linspace(0.0, 1.0, count + 1)[:, None]
        return bool(np.all(self.states_valid(start + t * (end - start))))

    def is_index_traversable(self, index: GridIndex) -> bool:
        cached = self._node_cache.get(index)
        if cached is None:
            cached = self.is_state_valid(
                index_to_center(index, self.voxel_size)
            )
            self._node_cache[index] = cached
        return cached

    def is_step_valid(self, a: GridIndex, b: GridIndex) -> bool:
        """Motion check between adjacent voxel centers, cached per pair."""
        if sum(abs(x - y) for x, y in zip(a, b)) == 1:
            # both endpoints valid implies the axis-aligned segment is valid
            return True
        key = (a, b) if a < b else (b, a)
        cached = self._step_cache.get(key)
        if cached is None:
            cached = self.is_motion_valid(
                index_to_center(a, self.voxel_size),
                index_to_center(b, self.voxel_size),
            )
            self._step_cache[key] = cached
        return cached

    def bounds(self) -> Tuple[FloatArray, FloatArray]:
        return self.snapshot.world_bounds()

    def clearance(self, p: Sequence[float]) -> Optional[float]:
        sample = self.snapshot.interpolate(p)
        return None if sample is None else sample[0]

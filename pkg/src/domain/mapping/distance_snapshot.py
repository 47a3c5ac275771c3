import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from src.domain.mapping.voxel_core import (
    FloatArray,
    GridIndex,
    index_to_center,
    point_to_index,
)
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer

logger = logging.getLogger()

BoolArray = npt.NDArray[np.bool_]
IntArray = npt.NDArray[np.int64]

_CORNERS = np.array(
    [[dx, dy, dz] for dx in (0, 1) for dy in (0, 1) for dz in (0, 1)],
    dtype=np.int64,
)


class DistanceSnapshot:
    """Frozen dense copy of a distance layer over its allocated extent.

    Unobserved voxels hold NaN. Lookups outside the extent are unobserved.
    """

    def __init__(
        self,
        distances: FloatArray,
        origin: GridIndex,
        voxel_size: float,
        parents: Optional[npt.NDArray[np.int16]] = None,
        fixed: Optional[BoolArray] = None,
    ) -> None:
        self.distances = distances
        self.origin = np.asarray(origin, dtype=np.int64)
        self._voxel_size = voxel_size
        self.parents = parents
        self.fixed = fixed
        self.observed = ~np.isnan(distances)
        self._occupied_dilated: Optional[Tuple[float, BoolArray]] = None

    @property
    def voxel_size(self) -> float:
        return self._voxel_size

    @property
    def shape(self) -> Tuple[int, int, int]:
        nx, ny, nz = self.distances.shape
        return (nx, ny, nz)

    @classmethod
    def from_layer(cls, layer: VoxelLayer) -> "DistanceSnapshot":
        bounds = layer.index_bounds()
        if bounds is None:
            return cls(
                np.full((0, 0, 0), np.nan), (0, 0, 0), layer.voxel_size
            )
        lower, upper = bounds
        shape = tuple(u - lo for u, lo in zip(upper, lower))
        distances = np.full(shape, np.nan, dtype=np.float64)
        parents: Optional[npt.NDArray[np.int16]] = None
        fixed: Optional[BoolArray] = None
        if layer.kind == VoxelKind.ESDF:
            parents = np.zeros(shape + (3,), dtype=np.int16)
            fixed = np.zeros(shape, dtype=bool)
        vps = layer.voxels_per_side
        for block_index, block in layer.iter_blocks():
            origin = layer.block_origin(block_index)
            sl = tuple(
                slice(o - lo, o - lo + vps) for o, lo in zip(origin, lower)
            )
            mask = layer.observed_mask(block)
            view = distances[sl]
            view[mask] = block["distance"][mask]
            if parents is not None and fixed is not None:
                parents[sl][mask] = block["parent"][mask]
                fixed[sl][mask] = block["fixed"][mask] > 0
        return cls(distances, lower, layer.voxel_size, parents, fixed)

    def local_index(self, index: Sequence[int]) -> Optional[Tuple[int, ...]]:
        local = tuple(int(i - o) for i, o in zip(index, self.origin))
        if any(
            c < 0 or c >= n for c, n in zip(local, self.distances.shape)
        ):
            return None
        return local

    def scalar_at(self, index: GridIndex) -> Optional[float]:
        local = self.local_index(index)
        if local is None:
            return None
        value = self.distances[local]
        if np.isnan(value):
            return None
        return float(value)

    def distance_at_point(self, p: Sequence[float]) -> Optional[float]:
        return self.scalar_at(point_to_index(p, self._voxel_size))

    def is_observed(self, index: GridIndex) -> bool:
        return self.scalar_at(index) is not None

    def values_at_indices(self, indices: IntArray) -> FloatArray:
        """NaN for unobserved or out-of-extent indices; indices shaped (n, 3)."""
        local = indices - self.origin
        inside = np.all(
            (local >= 0) & (local < np.array(self.distances.shape)), axis=1
        )
        values = np.full(len(indices), np.nan)
        if np.any(inside):
            sel = local[inside]
            values[inside] = self.distances[sel[:, 0], sel[:, 1], sel[:, 2]]
        return values

    def interpolate(
        self, p: Sequence[float]
    ) -> Optional[Tuple[float, FloatArray]]:
        values, gradients = self.interpolate_many(
            np.asarray(p, dtype=np.float64).reshape(1, 3)
        )
        if np.isnan(values[0]):
            return None
        return float(values[0]), gradients[0]

    def interpolate_many(
        self, points: FloatArray
    ) -> Tuple[FloatArray, FloatArray]:
        """Trilinear values and gradients; NaN rows where support is unknown."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        scaled = points / self._voxel_size - 0.5
        base = np.floor(scaled).astype(np.int64)
        fx, fy, fz = (scaled - base).T
        corner_indices = base[:, None, :] + _CORNERS[None, :, :]
        c = self.values_at_indices(corner_indices.reshape(-1, 3)).reshape(
            len(points), 2, 2, 2
        )
        c00 = c[:, 0, 0, 0] * (1 - fx) + c[:, 1, 0, 0] * fx
        c10 = c[:, 0, 1, 0] * (1 - fx) + c[:, 1, 1, 0] * fx
        c01 = c[:, 0, 0, 1] * (1 - fx) + c[:, 1, 0, 1] * fx
        c11 = c[:, 0, 1, 1] * (1 - fx) + c[:, 1, 1, 1] * fx
        c0 = c00 * (1 - fy) + c10 * fy
        c1 = c01 * (1 - fy) + c11 * fy
        values = c0 * (1 - fz) + c1 * fz

        dx0 = (c[:, 1, 0, 0] - c[:, 0, 0, 0]) * (1 - fy) + (
            c[:, 1, 1, 0] - c[:, 0, 1, 0]
        ) * fy
        dx1 = (c[:, 1, 0, 1] - c[:, 0, 0, 1]) * (1 - fy) + (
            c[:, 1, 1, 1] - c[:, 0, 1, 1]
        ) * fy
        gradients = np.stack(
            [
                dx0 * (1 - fz) + dx1 * fz,
                (c10 - c00) * (1 - fz) + (c11 - c01) * fz,
                c1 - c0,
            ],
            axis=1,
        ) / self._voxel_size
        return values, gradients

    def world_bounds(self) -> Tuple[FloatArray, FloatArray]:
        """Metric bounding box of the observed voxels."""
        observed = np.argwhere(self.observed)
        if len(observed) == 0:
            zero = np.zeros(3)
            return zero, zero
        lower = (observed.min(axis=0) + self.origin) * self._voxel_size
        upper = (observed.max(axis=0) + 1 + self.origin) * self._voxel_size
        return lower.astype(np.float64), upper.astype(np.float64)

    def observed_centers(self, min_distance: float) -> FloatArray:
        """Centers of observed voxels with distance >= min_distance."""
        with np.errstate(invalid="ignore"):
            mask = self.observed & (self.distances >= min_distance)
        indices = np.argwhere(mask) + self.origin
        return index_to_center(indices, self._voxel_size)

    def occupied_within(self, radius: float) -> BoolArray:
        """Voxels within radius of an observed voxel with negative distance."""
        if self._occupied_dilated is not None:
            cached_radius, cached = self._occupied_dilated
            if cached_radius == radius:
                return cached
        with np.errstate(invalid="ignore"):
            occupied = self.observed & (self.distances < 0)
        steps = int(np.ceil(radius / self._voxel_size))
        if steps > 0 and np.any(occupied):
            axis = np.arange(-steps, steps + 1)
            gx, gy, gz = np.meshgrid(axis, axis, axis, indexing="ij")
            ball = (gx**2 + gy**2 + gz**2) * self._voxel_size**2 <= (
                radius**2
            )
            occupied = ndimage.binary_dilation(occupied, structure=ball)
        self._occupied_dilated = (radius, occupied)
        return occupied

    def center_of(self, index: GridIndex) -> FloatArray:
        return index_to_center(index, self._voxel_size)

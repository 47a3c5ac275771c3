"""Voxel addressing, neighbor kernels, ray walking and trilinear lookup.

Indices are floor-based: a point on a voxel boundary belongs to the upper
voxel, so cells are half-open ``[i * vs, (i + 1) * vs)`` on every axis.
"""

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np
import numpy.typing as npt

GridIndex = Tuple[int, int, int]
FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class NeighborOffset:
    offset: GridIndex
    grid_distance: float


NEIGHBOR_OFFSETS: Tuple[GridIndex, ...] = tuple(
    (dx, dy, dz)
    for dx, dy, dz in itertools.product((-1, 0, 1), repeat=3)
    if (dx, dy, dz) != (0, 0, 0)
)
NEIGHBOR_UNIT_LENGTHS: Tuple[float, ...] = tuple(
    math.sqrt(dx * dx + dy * dy + dz * dz) for dx, dy, dz in NEIGHBOR_OFFSETS
)
FACE_OFFSETS: Tuple[GridIndex, ...] = tuple(
    offset for offset in NEIGHBOR_OFFSETS if sum(map(abs, offset)) == 1
)


class ScalarField(Protocol):
    @property
    def voxel_size(self) -> float: ...

    def scalar_at(self, index: GridIndex) -> Optional[float]: ...


def point_to_index(p: Sequence[float], voxel_size: float) -> GridIndex:
    return (
        int(math.floor(p[0] / voxel_size)),
        int(math.floor(p[1] / voxel_size)),
        int(math.floor(p[2] / voxel_size)),
    )


def index_to_center(index: npt.ArrayLike, voxel_size: float) -> FloatArray:
    """Voxel centre of one index, or of every row of an index array."""
    return (np.asarray(index, dtype=np.float64) + 0.5) * voxel_size


def neighbors26(
    index: GridIndex, voxel_size: float = 1.0
) -> List[Tuple[GridIndex, NeighborOffset]]:
    x, y, z = index
    return [
        (
            (x + dx, y + dy, z + dz),
            NeighborOffset((dx, dy, dz), length * voxel_size),
        )
        for (dx, dy, dz), length in zip(NEIGHBOR_OFFSETS, NEIGHBOR_UNIT_LENGTHS)
    ]


def cast_ray(
    start: Sequence[float], end: Sequence[float], voxel_size: float
) -> List[GridIndex]:
    """Every voxel the segment start -> end passes through, in order."""
    origin = np.asarray(start, dtype=np.float64) / voxel_size
    target = np.asarray(end, dtype=np.float64) / voxel_size
    current = [int(math.floor(c)) for c in origin]
    last = [int(math.floor(c)) for c in target]
    direction = target - origin

    steps = [0, 0, 0]
    t_max = [math.inf, math.inf, math.inf]
    t_delta = [math.inf, math.inf, math.inf]
    for axis in range(3):
        if direction[axis] > 0:
            steps[axis] = 1
            t_delta[axis] = 1.0 / direction[axis]
            t_max[axis] = (current[axis] + 1 - origin[axis]) * t_delta[axis]
        elif direction[axis] < 0:
            steps[axis] = -1
            t_delta[axis] = -1.0 / direction[axis]
            t_max[axis] = (origin[axis] - current[axis]) * t_delta[axis]

    voxels: List[GridIndex] = [(current[0], current[1], current[2])]
    max_steps = sum(abs(last[axis] - current[axis]) for axis in range(3))
    for _ in range(max_steps):
        axis = int(np.argmin(t_max))
        if t_max[axis] > 1.0:
            break
        current[axis] += steps[axis]
        t_max[axis] += t_delta[axis]
        voxels.append((current[0], current[1], current[2]))
    if voxels[-1] != tuple(last) and max_steps > 0:
        # floating point drift at exact boundaries
        voxels.append((last[0], last[1], last[2]))
    return voxels


def trilinear_support(
    p: Sequence[float], voxel_size: float
) -> Tuple[GridIndex, FloatArray]:
    """Lower corner of the 8 supporting voxel centers and the cell fraction."""
    scaled = np.asarray(p, dtype=np.float64) / voxel_size - 0.5
    base = np.floor(scaled)
    fraction = scaled - base
    return (int(base[0]), int(base[1]), int(base[2])), fraction


def trilinear_from_corners(
    corners: FloatArray, fraction: FloatArray, voxel_size: float
) -> Tuple[float, FloatArray]:
    fx, fy, fz = (float(f) for f in fraction)
    c = corners
    c00 = c[0, 0, 0] * (1 - fx) + c[1, 0, 0] * fx
    c10 = c[0, 1, 0] * (1 - fx) + c[1, 1, 0] * fx
    c01 = c[0, 0, 1] * (1 - fx) + c[1, 0, 1] * fx
    c11 = c[0, 1, 1] * (1 - fx) + c[1, 1, 1] * fx
    c0 = c00 * (1 - fy) + c10 * fy
    c1 = c01 * (1 - fy) + c11 * fy
    value = c0 * (1 - fz) + c1 * fz

    dx00 = c[1, 0, 0] - c[0, 0, 0]
    dx10 = c[1, 1, 0] - c[0, 1, 0]
    dx01 = c[1, 0, 1] - c[0, 0, 1]
    dx11 = c[1, 1, 1] - c[0, 1, 1]
    dx0 = dx00 * (1 - fy) + dx10 * fy
    dx1 = dx01 * (1 - fy) + dx11 * fy
    grad_x = dx0 * (1 - fz) + dx1 * fz
    grad_y = (c10 - c00) * (1 - fz) + (c11 - c01) * fz
    grad_z = c1 - c0
    gradient = np.array([grad_x, grad_y, grad_z]) / voxel_size
    return float(value), gradient


def interpolate_trilinear(
    layer: ScalarField, p: Sequence[float]
) -> Optional[Tuple[float, FloatArray]]:
    """Value and analytic gradient, or None when a support voxel is unknown."""
    voxel_size = layer.voxel_size
    base, fraction = trilinear_support(p, voxel_size)
    corners = np.empty((2, 2, 2), dtype=np.float64)
    for dx, dy, dz in itertools.product((0, 1), repeat=3):
        value = layer.scalar_at((base[0] + dx, base[1] + dy, base[2] + dz))
        if value is None:
            return None
        corners[dx, dy, dz] = value
    return trilinear_from_corners(corners, fraction, voxel_size)

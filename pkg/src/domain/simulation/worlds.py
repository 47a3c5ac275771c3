"""Synthetic indoor maps built directly as ESDF layers.

Every voxel of the box is observed; space outside it stays unknown.
"""

import logging
from typing import Tuple

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from src.common.dto import LayerConfig
from src.domain.mapping.distance_snapshot import BoolArray
from src.domain.mapping.voxel_core import GridIndex
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer

logger = logging.getLogger()

_INTERIOR: GridIndex = (-1, -1, -1)


def _nearest(mask: BoolArray) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    """Voxel distance from every voxel to the nearest True voxel, and its index."""
    distances, indices = ndimage.distance_transform_edt(~mask, return_indices=True)
    return distances, np.moveaxis(indices, 0, -1)


def esdf_from_occupancy(
    occupied: BoolArray,
    layer_config: LayerConfig,
    origin: GridIndex = (0, 0, 0),
    max_distance: float = 4.0,
) -> VoxelLayer:
    """Exact Euclidean ESDF of a dense occupancy grid.

    The surface sits half a voxel from the boundary voxels on either side,
    parents point at the nearest voxel across the surface and the voxels
    touching it are fixed.
    """
    vs = layer_config.voxel_size
    shape = occupied.shape
    grid = np.stack(np.meshgrid(*(np.arange(n) for n in shape), indexing="ij"), -1)
    if occupied.any():
        to_occupied, occupied_at = _nearest(occupied)
    else:
        to_occupied = np.full(shape, np.inf)
        occupied_at = grid.copy()
    if (~occupied).any():
        to_free, free_at = _nearest(~occupied)
    else:
        to_free = np.full(shape, np.inf)
        free_at = grid.copy()

    distance = np.where(occupied, -(to_free - 0.5) * vs, (to_occupied - 0.5) * vs)
    distance = np.clip(distance, -max_distance, max_distance)
    parent = np.where(occupied[..., None], free_at - grid, occupied_at - grid)
    fixed = np.where(occupied, to_free, to_occupied) <= 1.0
    parent[fixed] = 0

    layer = VoxelLayer(layer_config, VoxelKind.ESDF)
    vps = layer_config.voxels_per_side
    blocks = [int(np.ceil((o + n) / vps)) - o // vps for o, n in zip(origin, shape)]
    first = [o // vps for o in origin]
    for bx in range(first[0], first[0] + blocks[0]):
        for by in range(first[1], first[1] + blocks[1]):
            for bz in range(first[2], first[2] + blocks[2]):
                _fill_block(layer, (bx, by, bz), origin, distance, parent, fixed)
    logger.info(
        f"Built ESDF over {shape} voxels ({int(occupied.sum())} occupied) "
        f"in {len(layer.blocks)} blocks"
    )
    return layer


def _fill_block(
    layer: VoxelLayer,
    block_index: GridIndex,
    origin: GridIndex,
    distance: npt.NDArray[np.float64],
    parent: npt.NDArray[np.int64],
    fixed: BoolArray,
) -> None:
    block_origin = layer.block_origin(block_index)
    vps = layer.voxels_per_side
    source = []
    target = []
    for axis in range(3):
        lo = max(block_origin[axis], origin[axis])
        hi = min(block_origin[axis] + vps, origin[axis] + distance.shape[axis])
        if hi <= lo:
            return
        source.append(slice(lo - origin[axis], hi - origin[axis]))
        target.append(slice(lo - block_origin[axis], hi - block_origin[axis]))
    block = layer.allocate_block(block_index)
    src, dst = tuple(source), tuple(target)
    block["distance"][dst] = distance[src]
    block["observed"][dst] = 1
    block["fixed"][dst] = fixed[src]
    block["parent"][dst] = parent[src]


def _box(size: Tuple[float, float, float], voxel_size: float) -> BoolArray:
    """Closed box: floor, ceiling and outer walls one voxel thick.

    With the grid placed at ``_INTERIOR`` the free interior starts at the
    world origin.
    """
    shape = tuple(int(round(s / voxel_size)) + 2 for s in size)
    occupied = np.zeros(shape, dtype=bool)
    occupied[[0, -1], :, :] = True
    occupied[:, [0, -1], :] = True
    occupied[:, :, [0, -1]] = True
    return occupied


def _cells(value: float, voxel_size: float) -> int:
    """Grid coordinate of a metric position inside a box built by ``_box``."""
    return int(round(value / voxel_size)) + 1


def build_two_room_world(voxel_size: float = 0.2) -> VoxelLayer:
    """Two 4 x 4 x 2 m rooms joined by a 1.2 x 1.6 m doorway."""
    occupied = _box((8.0, 4.0, 2.0), voxel_size)
    wall = _cells(4.0, voxel_size)
    occupied[wall, :, :] = True
    door_y = slice(_cells(1.4, voxel_size), _cells(2.6, voxel_size))
    occupied[wall, door_y, 1 : _cells(1.6, voxel_size)] = False
    return esdf_from_occupancy(occupied, LayerConfig(voxel_size=voxel_size), _INTERIOR)


def build_nonconvex_world(voxel_size: float = 0.2) -> VoxelLayer:
    """10 x 10 x 2 m serpentine: two baffles leave gaps at opposite ends."""
    occupied = _box((10.0, 10.0, 2.0), voxel_size)
    first = _cells(10.0 / 3.0, voxel_size)
    second = _cells(20.0 / 3.0, voxel_size)
    occupied[first, : _cells(7.5, voxel_size), :] = True
    occupied[second, _cells(2.5, voxel_size) :, :] = True
    return esdf_from_occupancy(occupied, LayerConfig(voxel_size=voxel_size), _INTERIOR)


import logging
from enum import IntEnum
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from src.common.dto import LayerConfig
from src.domain.mapping.voxel_core import GridIndex

logger = logging.getLogger()


class VoxelKind(IntEnum):
    TSDF = 1
    ESDF = 2
    SKELETON = 3


VOXEL_DTYPES: Dict[VoxelKind, np.dtype] = {  # type: ignore[type-arg]
    VoxelKind.TSDF: np.dtype([("distance", "<f8"), ("weight", "<f8")]),
    VoxelKind.ESDF: np.dtype(
        [
            ("distance", "<f8"),
            ("observed", "u1"),
            ("fixed", "u1"),
            ("hallucinated", "u1"),
            ("crossing", "u1"),
            ("parent", "<i2", (3,)),
        ]
    ),
    VoxelKind.SKELETON: np.dtype(
        [
            ("distance", "<f8"),
            ("num_basis_neighbors", "u1"),
            ("is_face", "u1"),
            ("is_edge", "u1"),
            ("is_vertex", "u1"),
        ]
    ),
}

Block = npt.NDArray[np.void]


class VoxelLayer:
    """Block-hashed voxel store; unallocated voxels read as unobserved."""

    def __init__(self, config: LayerConfig, kind: VoxelKind) -> None:
        self.config = config
        self.kind = kind
        self.dtype = VOXEL_DTYPES[kind]
        self.blocks: Dict[GridIndex, Block] = {}

    @property
    def voxel_size(self) -> float:
        return self.config.voxel_size

    @property
    def voxels_per_side(self) -> int:
        return self.config.voxels_per_side

    def block_index_of(self, index: GridIndex) -> GridIndex:
        vps = self.voxels_per_side
        return (index[0] // vps, index[1] // vps, index[2] // vps)

    def _local(self, index: GridIndex) -> Tuple[int, int, int]:
        vps = self.voxels_per_side
        return (index[0] % vps, index[1] % vps, index[2] % vps)

    def allocate_block(self, block_index: GridIndex) -> Block:
        block = self.blocks.get(block_index)
        if block is None:
            vps = self.voxels_per_side
            block = np.zeros((vps, vps, vps), dtype=self.dtype)
            self.blocks[block_index] = block
        return block

    def get_voxel(self, index: GridIndex) -> Optional[np.void]:
        block = self.blocks.get(self.block_index_of(index))
        if block is None:
            return None
        return block[self._local(index)]  # type: ignore[no-any-return]

    def get_or_allocate(self, index: GridIndex) -> np.void:
        block = self.allocate_block(self.block_index_of(index))
        return block[self._local(index)]  # type: ignore[no-any-return]

    def is_observed(self, index: GridIndex) -> bool:
        voxel = self.get_voxel(index)
        if voxel is None:
            return False
        if self.kind == VoxelKind.TSDF:
            return bool(voxel["weight"] > 0)
        if self.kind == VoxelKind.ESDF:
            return bool(voxel["observed"])
        return bool(voxel["is_face"])

    def scalar_at(self, index: GridIndex) -> Optional[float]:
        if not self.is_observed(index):
            return None
        voxel = self.get_voxel(index)
        assert voxel is not None
        return float(voxel["distance"])

    def block_origin(self, block_index: GridIndex) -> GridIndex:
        vps = self.voxels_per_side
        return (
            block_index[0] * vps,
            block_index[1] * vps,
            block_index[2] * vps,
        )

    def observed_mask(self, block: Block) -> npt.NDArray[np.bool_]:
        if self.kind == VoxelKind.TSDF:
            return block["weight"] > 0  # type: ignore[no-any-return]
        if self.kind == VoxelKind.ESDF:
            return block["observed"] > 0  # type: ignore[no-any-return]
        return block["is_face"] > 0  # type: ignore[no-any-return]

    def observed_indices(self) -> List[GridIndex]:
        indices: List[GridIndex] = []
        for block_index in sorted(self.blocks):
            block = self.blocks[block_index]
            ox, oy, oz = self.block_origin(block_index)
            for lx, ly, lz in np.argwhere(self.observed_mask(block)):
                indices.append((ox + int(lx), oy + int(ly), oz + int(lz)))
        return indices

    def iter_blocks(self) -> Iterator[Tuple[GridIndex, Block]]:
        for block_index in sorted(self.blocks):
            yield block_index, self.blocks[block_index]

    def index_bounds(self) -> Optional[Tuple[GridIndex, GridIndex]]:
        """Inclusive min and exclusive max voxel index over allocated blocks."""
        if not self.blocks:
            return None
        keys = np.array(list(self.blocks.keys()), dtype=np.int64)
        vps = self.voxels_per_side
        lower = keys.min(axis=0) * vps
        upper = (keys.max(axis=0) + 1) * vps
        return (
            (int(lower[0]), int(lower[1]), int(lower[2])),
            (int(upper[0]), int(upper[1]), int(upper[2])),
        )

    def copy(self) -> "VoxelLayer":
        clone = VoxelLayer(self.config, self.kind)
        clone.blocks = {key: block.copy() for key, block in self.blocks.items()}
        return clone

    def __len__(self) -> int:
        return len(self.blocks)

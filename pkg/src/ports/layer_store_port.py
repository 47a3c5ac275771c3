from abc import ABC, abstractmethod
from typing import Optional, Tuple

from src.common.dto import RunManifest
from src.domain.mapping.voxel_layer import VoxelLayer


class LayerStorePort(ABC):
    @abstractmethod
    def read(self, path: str) -> Tuple[VoxelLayer, Optional[RunManifest]]:
        raise NotImplementedError

    @abstractmethod
    def write(
        self,
        path: str,
        layer: VoxelLayer,
        manifest: Optional[RunManifest] = None,
    ) -> None:
        raise NotImplementedError

import json
import logging
import struct
from typing import BinaryIO, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from src.adapters.exceptions import LayerFormatException
from src.common.dto import LayerConfig, RunManifest
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer
from src.ports.layer_store_port import LayerStorePort

logger = logging.getLogger()

MAGIC = b"VXPL"
MANIFEST_MAGIC = b"VXMF"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sIdIIQ")
_BLOCK_INDEX = struct.Struct("<3q")
_TRAILER = struct.Struct("<4sI")


def _read_exact(handle: BinaryIO, size: int, what: str) -> bytes:
    data = handle.read(size)
    if len(data) != size:
        raise LayerFormatException(f"Truncated layer file while reading {what}.")
    return data


class LayerFileAdapter(LayerStorePort):
    """Little-endian block layer files with an optional manifest trailer."""

    def write(
        self,
        path: str,
        layer: VoxelLayer,
        manifest: Optional[RunManifest] = None,
    ) -> None:
        with open(path, "wb") as handle:
            handle.write(
                _HEADER.pack(
                    MAGIC,
                    FORMAT_VERSION,
                    layer.voxel_size,
                    layer.voxels_per_side,
                    int(layer.kind),
                    len(layer.blocks),
                )
            )
            for block_index, block in layer.iter_blocks():
                handle.write(_BLOCK_INDEX.pack(*block_index))
                handle.write(np.ascontiguousarray(block).tobytes())
            if manifest is not None:
                payload = manifest.model_dump_json().encode("utf-8")
                handle.write(_TRAILER.pack(MANIFEST_MAGIC, len(payload)))
                handle.write(payload)
        logger.info(
            f"Wrote {layer.kind.name} layer with {len(layer.blocks)} blocks to {path}"
        )

    def read(self, path: str) -> Tuple[VoxelLayer, Optional[RunManifest]]:
        with open(path, "rb") as handle:
            magic, version, voxel_size, vps, kind, count = _HEADER.unpack(
                _read_exact(handle, _HEADER.size, "header")
            )
            if magic != MAGIC:
                raise LayerFormatException(f"Not a layer file: {path}")
            if version != FORMAT_VERSION:
                raise LayerFormatException(f"Unsupported layer version {version}.")
            try:
                layer = VoxelLayer(
                    LayerConfig(voxel_size=voxel_size, voxels_per_side=vps),
                    VoxelKind(kind),
                )
            except (ValidationError, ValueError) as error:
                logger.error(f"Invalid layer header in {path}: {error}")
                raise LayerFormatException(f"Invalid layer header: {error}")
            payload_size = vps**3 * layer.dtype.itemsize
            for _ in range(count):
                block_index = _BLOCK_INDEX.unpack(
                    _read_exact(handle, _BLOCK_INDEX.size, "block index")
                )
                payload = _read_exact(handle, payload_size, "block payload")
                block = np.frombuffer(payload, dtype=layer.dtype).reshape(vps, vps, vps)
                key = (int(block_index[0]), int(block_index[1]), int(block_index[2]))
                layer.blocks[key] = block.copy()
            manifest = self._read_manifest(handle)
        return layer, manifest

    def _read_manifest(self, handle: BinaryIO) -> Optional[RunManifest]:
        trailer = handle.read(_TRAILER.size)
        if not trailer:
            return None
        if len(trailer) != _TRAILER.size:
            raise LayerFormatException("Truncated manifest trailer.")
        magic, length = _TRAILER.unpack(trailer)
        if magic != MANIFEST_MAGIC:
            raise LayerFormatException("Unexpected data after the last block.")
        payload = _read_exact(handle, length, "manifest")
        try:
            return RunManifest.model_validate(json.loads(payload.decode("utf-8")))
        except (ValueError, ValidationError) as error:
            raise LayerFormatException(f"Invalid manifest trailer: {error}")

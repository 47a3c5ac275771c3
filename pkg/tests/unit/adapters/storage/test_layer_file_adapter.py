import struct
from pathlib import Path

import numpy as np
import pytest

from src.adapters.exceptions import LayerFormatException
from src.adapters.storage.layer_file_adapter import (
    MAGIC,
    LayerFileAdapter,
)
from src.common.dto import LayerConfig, RunManifest
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer
from src.domain.simulation.worlds import esdf_from_occupancy


@pytest.fixture
def layer() -> VoxelLayer:
    occupied = np.zeros((6, 5, 4), dtype=bool)
    occupied[0] = True
    return esdf_from_occupancy(
        occupied, LayerConfig(voxel_size=0.1, voxels_per_side=4), (-2, 0, 0)
    )


@pytest.fixture
def manifest() -> RunManifest:
    return RunManifest(
        subcommand="esdf", flags={"--metric": "quasi"}, seed=3, tool_version="0.1.0"
    )


class TestLayerFileAdapter:
    def test_round_trip_with_manifest(
        self, tmp_path: Path, layer: VoxelLayer, manifest: RunManifest
    ) -> None:
        # Arrange
        path = str(tmp_path / "map.esdf")
        adapter = LayerFileAdapter()

        # Act
        adapter.write(path, layer, manifest)
        loaded, loaded_manifest = adapter.read(path)

        # Assert
        assert loaded.kind == VoxelKind.ESDF
        assert loaded.voxel_size == pytest.approx(0.1)
        assert loaded.voxels_per_side == 4
        assert sorted(loaded.blocks) == sorted(layer.blocks)
        for index, block in layer.iter_blocks():
            assert loaded.blocks[index].tobytes() == block.tobytes()
        assert loaded_manifest == manifest

    def test_manifest_is_optional(self, tmp_path: Path, layer: VoxelLayer) -> None:
        # Arrange
        path = str(tmp_path / "map.esdf")
        adapter = LayerFileAdapter()

        # Act
        adapter.write(path, layer)
        _, manifest = adapter.read(path)

        # Assert
        assert manifest is None

    def test_empty_tsdf_layer(self, tmp_path: Path) -> None:
        # Arrange
        path = str(tmp_path / "empty.tsdf")
        layer = VoxelLayer(LayerConfig(voxel_size=0.2), VoxelKind.TSDF)

        # Act
        LayerFileAdapter().write(path, layer)
        loaded, _ = LayerFileAdapter().read(path)

        # Assert
        assert loaded.kind == VoxelKind.TSDF
        assert len(loaded) == 0

    def test_wrong_magic(self, tmp_path: Path) -> None:
        # Arrange
        path = tmp_path / "bad.esdf"
        path.write_bytes(b"NOPE" + bytes(28))

        # Act / Assert
        with pytest.raises(LayerFormatException, match="Not a layer file"):
            LayerFileAdapter().read(str(path))

    def test_truncated_block(self, tmp_path: Path, layer: VoxelLayer) -> None:
        # Arrange
        path = tmp_path / "cut.esdf"
        LayerFileAdapter().write(str(path), layer)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 10])

        # Act / Assert
        with pytest.raises(LayerFormatException, match="Truncated"):
            LayerFileAdapter().read(str(path))

    def test_trailing_garbage(self, tmp_path: Path, layer: VoxelLayer) -> None:
        # Arrange
        path = tmp_path / "extra.esdf"
        LayerFileAdapter().write(str(path), layer)
        with open(path, "ab") as handle:
            handle.write(b"JUNKJUNK")

        # Act / Assert
        with pytest.raises(LayerFormatException, match="Unexpected data"):
            LayerFileAdapter().read(str(path))

    @pytest.mark.parametrize(
        "version, vps, kind, message",
        [(2, 4, 2, "version"), (1, 3, 2, "header"), (1, 4, 9, "header")],
    )
    def test_invalid_header(
        self, tmp_path: Path, version: int, vps: int, kind: int, message: str
    ) -> None:
        # Arrange
        path = tmp_path / "header.esdf"
        path.write_bytes(struct.pack("<4sIdIIQ", MAGIC, version, 0.1, vps, kind, 0))

        # Act / Assert
        with pytest.raises(LayerFormatException, match=message):
            LayerFileAdapter().read(str(path))

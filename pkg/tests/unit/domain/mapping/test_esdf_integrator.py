import itertools
import math
from typing import Dict, Iterable

import networkx as nx
import numpy as np
import numpy.typing as npt
import pytest
from scipy.ndimage import distance_transform_edt
from scipy.spatial.transform import Rotation

from src.common.dto import DistanceMetric, EsdfConfig, LayerConfig, TsdfConfig
from src.domain.exceptions import InvalidLayerException
from src.domain.mapping.esdf_integrator import (
    EsdfIntegrator,
    apply_spheres,
    lookup,
    update_esdf,
)
from src.domain.mapping.tsdf_integrator import SensorScan, integrate_scan
from src.domain.mapping.voxel_core import GridIndex, neighbors26
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer

VOXEL_SIZE = 0.1
LAYER_CONFIG = LayerConfig(voxel_size=VOXEL_SIZE, voxels_per_side=8)
FREE = 0.2


def tsdf_grid(
    shape: GridIndex, surface: Dict[GridIndex, float]
) -> VoxelLayer:
    """Fully observed box of positive TSDF voxels with a few surface voxels."""
    layer = VoxelLayer(LAYER_CONFIG, VoxelKind.TSDF)
    for index in itertools.product(*(range(n) for n in shape)):
        voxel = layer.get_or_allocate(index)
        voxel["distance"] = surface.get(index, FREE)
        voxel["weight"] = 1.0
    return layer


def esdf_distances(esdf: VoxelLayer) -> Dict[GridIndex, float]:
    distances = {}
    for index in esdf.observed_indices():
        value = esdf.scalar_at(index)
        assert value is not None
        distances[index] = value
    return distances


def dijkstra_reference(
    tsdf: VoxelLayer, band: float
) -> Dict[GridIndex, float]:
    observed = set(tsdf.observed_indices())
    fixed = {
        index
        for index in observed
        if abs(tsdf.scalar_at(index) or 0.0) < band
    }
    graph = nx.DiGraph()
    for index in fixed:
        graph.add_edge("surface", index, weight=abs(tsdf.scalar_at(index) or 0.0))
    for index in observed:
        for neighbor, offset in neighbors26(index, VOXEL_SIZE):
            if neighbor in observed and neighbor not in fixed:
                graph.add_edge(index, neighbor, weight=offset.grid_distance)
    lengths = nx.single_source_dijkstra_path_length(graph, "surface")
    return {key: value for key, value in lengths.items() if key != "surface"}


def update(
    tsdf: VoxelLayer,
    esdf: VoxelLayer,
    config: EsdfConfig,
    indices: Iterable[GridIndex],
) -> None:
    update_esdf(tsdf, esdf, list(indices), config)


def random_obstacles(seed: int, shape: GridIndex) -> npt.NDArray[np.bool_]:
    rng = np.random.default_rng(seed)
    occupied = rng.random(shape) < 0.06
    occupied[0, 0, 0] = True
    return occupied


def random_scan(rng: np.random.Generator) -> SensorScan:
    directions = rng.normal(size=(30, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    ranges = rng.uniform(0.6, 1.2, size=(30, 1))
    return SensorScan(
        rotation=Rotation.identity(),
        translation=rng.uniform((0.0, 0.0, 0.0), (1.0, 1.0, 0.5)),
        points=directions * ranges,
    )


def assert_same_distances(
    actual: Dict[GridIndex, float], expected: Dict[GridIndex, float]
) -> None:
    assert set(actual) == set(expected)
    for index, value in expected.items():
        assert actual[index] == pytest.approx(value, abs=1e-6), index


@pytest.fixture
def config() -> EsdfConfig:
    return EsdfConfig(fixed_band_radius=0.1)


@pytest.fixture
def tsdf() -> VoxelLayer:
    surface = {(0, y, z): 0.05 for y in range(6) for z in range(3)}
    surface[(4, 4, 1)] = 0.0
    return tsdf_grid((6, 6, 3), surface)


class TestBatchUpdate:
    def test_quasi_euclidean_matches_dijkstra(
        self, tsdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        # Arrange
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        expected = dijkstra_reference(tsdf, config.fixed_band_radius)

        # Act
        update_esdf(tsdf, esdf, None, config)

        # Assert
        actual = esdf_distances(esdf)
        assert set(actual) == set(expected)
        for index, value in expected.items():
            assert actual[index] == pytest.approx(value, abs=1e-5), index

    def test_fixed_band_copies_tsdf(
        self, tsdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        # Arrange
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)

        # Act
        update_esdf(tsdf, esdf, None, config)

        # Assert
        voxel = esdf.get_voxel((0, 3, 1))
        assert voxel is not None
        assert voxel["fixed"]
        assert float(voxel["distance"]) == pytest.approx(0.05)

    def test_full_euclidean_is_exact(self, config: EsdfConfig) -> None:
        # Arrange
        tsdf = tsdf_grid((6, 6, 1), {(0, 0, 0): 0.0})
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        full = config.model_copy(update={"metric": DistanceMetric.FULL_EUCLIDEAN})

        # Act
        update_esdf(tsdf, esdf, None, full)
        exact = esdf.scalar_at((4, 3, 0))
        update_esdf(tsdf, esdf, None, config)
        quasi = esdf.scalar_at((4, 3, 0))

        # Assert
        assert exact == pytest.approx(0.5)
        assert quasi == pytest.approx(0.3 * math.sqrt(2) + 0.1)

    def test_mismatched_layers_are_rejected(
        self, tsdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        with pytest.raises(InvalidLayerException):
            EsdfIntegrator(tsdf, tsdf, config)


class TestIncrementalUpdate:
    def test_first_update_matches_batch(
        self, tsdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        # Arrange
        incremental = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        batch = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)

        # Act
        update(tsdf, incremental, config, tsdf.observed_indices())
        update_esdf(tsdf, batch, None, config)

        # Assert
        expected = esdf_distances(batch)
        actual = esdf_distances(incremental)
        assert set(actual) == set(expected)
        for index, value in expected.items():
            assert actual[index] == pytest.approx(value, abs=1e-5), index

    def test_removed_surface_is_raised_and_relowered(
        self, tsdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        # Arrange
        integrator = EsdfIntegrator(
            tsdf, VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF), config
        )
        integrator.update_incremental(tsdf.observed_indices())
        changed = [(4, 4, 1), (1, 5, 2)]
        tsdf.get_or_allocate(changed[0])["distance"] = FREE
        tsdf.get_or_allocate(changed[1])["distance"] = 0.0
        batch = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)

        # Act
        summary = integrator.update_incremental(changed)
        update_esdf(tsdf, batch, None, config)

        # Assert
        assert summary.raised > 0
        expected = esdf_distances(batch)
        actual = esdf_distances(integrator.esdf)
        for index, value in expected.items():
            assert actual[index] == pytest.approx(value, abs=1e-5), index

    def test_unchanged_fixed_voxels_do_nothing(
        self, tsdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        # Arrange
        integrator = EsdfIntegrator(
            tsdf, VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF), config
        )
        integrator.update_incremental(tsdf.observed_indices())

        # Act
        summary = integrator.update_incremental([(0, 2, 2)])

        # Assert
        assert summary.lowered == 0
        assert summary.raised == 0

    def test_crossing_voxel_follows_neighbor_turning_fixed(
        self, config: EsdfConfig
    ) -> None:
        # Arrange
        tsdf = tsdf_grid((5, 1, 1), {(2, 0, 0): -FREE})
        integrator = EsdfIntegrator(
            tsdf, VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF), config
        )
        integrator.update_incremental(tsdf.observed_indices())
        crossing = integrator.esdf.get_voxel((1, 0, 0))
        assert crossing is not None
        assert float(crossing["distance"]) == pytest.approx(0.05)
        assert crossing["crossing"]
        tsdf.get_or_allocate((2, 0, 0))["distance"] = -0.03
        batch = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)

        # Act
        integrator.update_incremental([(2, 0, 0)])
        update_esdf(tsdf, batch, None, config)

        # Assert
        assert integrator.esdf.scalar_at((1, 0, 0)) == pytest.approx(0.13)
        assert integrator.esdf.scalar_at((0, 0, 0)) == pytest.approx(0.23)
        assert not crossing["crossing"]
        assert_same_distances(esdf_distances(integrator.esdf), esdf_distances(batch))

    @pytest.mark.parametrize(
        "metric", [DistanceMetric.QUASI_EUCLIDEAN, DistanceMetric.FULL_EUCLIDEAN]
    )
    @pytest.mark.parametrize("seed", range(8))
    def test_random_scans_match_batch(
        self, metric: DistanceMetric, seed: int
    ) -> None:
        # Arrange
        rng = np.random.default_rng(seed)
        tsdf = VoxelLayer(LAYER_CONFIG, VoxelKind.TSDF)
        incremental = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        batch = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        tsdf_config = TsdfConfig(truncation_distance=0.2)
        config = EsdfConfig(fixed_band_radius=0.1, metric=metric)

        # Act
        for _ in range(6):
            updated = integrate_scan(tsdf, random_scan(rng), tsdf_config)
            update_esdf(tsdf, incremental, updated, config)
        update_esdf(tsdf, batch, None, config)

        # Assert
        assert_same_distances(esdf_distances(incremental), esdf_distances(batch))


class TestRandomLayouts:
    SHAPE = (8, 8, 6)

    @pytest.mark.parametrize("seed", range(100))
    def test_quasi_euclidean_matches_dijkstra(
        self, config: EsdfConfig, seed: int
    ) -> None:
        # Arrange
        occupied = random_obstacles(seed, self.SHAPE)
        surface = {tuple(map(int, index)): 0.0 for index in np.argwhere(occupied)}
        tsdf = tsdf_grid(self.SHAPE, surface)  # type: ignore[arg-type]
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)

        # Act
        update_esdf(tsdf, esdf, None, config)

        # Assert
        expected = dijkstra_reference(tsdf, config.fixed_band_radius)
        assert_same_distances(esdf_distances(esdf), expected)

    @pytest.mark.parametrize("seed", range(25))
    def test_full_euclidean_matches_distance_transform(
        self, config: EsdfConfig, seed: int
    ) -> None:
        # Arrange
        occupied = random_obstacles(seed, self.SHAPE)
        surface = {tuple(map(int, index)): 0.0 for index in np.argwhere(occupied)}
        tsdf = tsdf_grid(self.SHAPE, surface)  # type: ignore[arg-type]
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        full = config.model_copy(update={"metric": DistanceMetric.FULL_EUCLIDEAN})
        exact = distance_transform_edt(~occupied) * VOXEL_SIZE

        # Act
        update_esdf(tsdf, esdf, None, full)

        # Assert
        expected = {
            index: float(exact[index])
            for index in itertools.product(*(range(n) for n in self.SHAPE))
        }
        assert_same_distances(esdf_distances(esdf), expected)


class TestSpheres:
    def test_hallucinated_free_and_occupied_space(self) -> None:
        # Arrange
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)

        # Act
        modified = apply_spheres(esdf, (0.05, 0.05, 0.05), 0.25, 0.45)

        # Assert
        assert (0, 0, 0) in modified
        assert esdf.scalar_at((0, 0, 0)) == pytest.approx(0.25)
        assert esdf.scalar_at((3, 0, 0)) == pytest.approx(-VOXEL_SIZE)
        assert esdf.get_voxel((5, 0, 0)) is None or not esdf.is_observed((5, 0, 0))

    def test_observed_voxels_are_kept(self) -> None:
        # Arrange
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        voxel = esdf.get_or_allocate((1, 0, 0))
        voxel["observed"] = 1
        voxel["distance"] = 0.7

        # Act
        modified = apply_spheres(esdf, (0.05, 0.05, 0.05), 0.25, 0.45)

        # Assert
        assert (1, 0, 0) not in modified
        assert esdf.scalar_at((1, 0, 0)) == pytest.approx(0.7)

    def test_clear_radius_must_be_smaller(self) -> None:
        with pytest.raises(ValueError, match="clear_radius"):
            apply_spheres(
                VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF), (0, 0, 0), 1.0, 0.5
            )

    def test_lookup_interpolates(
        self, tsdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        # Arrange
        esdf = VoxelLayer(LAYER_CONFIG, VoxelKind.ESDF)
        update_esdf(tsdf, esdf, None, config)

        # Act
        result = lookup(esdf, (0.15, 0.25, 0.15))

        # Assert
        assert result is not None
        assert result[1][0] > 0

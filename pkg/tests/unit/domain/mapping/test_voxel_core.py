import math
from typing import Optional, Tuple

import numpy as np
import pytest

from src.domain.mapping.voxel_core import (
    FACE_OFFSETS,
    NEIGHBOR_OFFSETS,
    GridIndex,
    cast_ray,
    index_to_center,
    interpolate_trilinear,
    neighbors26,
    point_to_index,
)


class LinearField:
    """Every voxel holds a linear function of its center."""

    voxel_size = 0.1

    def scalar_at(self, index: GridIndex) -> Optional[float]:
        center = index_to_center(index, self.voxel_size)
        return float(2.0 * center[0] - center[1] + 0.5 * center[2])


class TestIndexing:
    @pytest.mark.parametrize(
        "point, expected",
        [
            ((0.05, 0.05, 0.05), (0, 0, 0)),
            ((0.1, 0.0, 0.0), (1, 0, 0)),
            ((-0.01, 0.0, 0.0), (-1, 0, 0)),
            ((-0.15, -0.25, 0.35), (-2, -3, 3)),
        ],
    )
    def test_point_to_index(
        self, point: Tuple[float, float, float], expected: GridIndex
    ) -> None:
        assert point_to_index(point, 0.1) == expected

    def test_center_round_trip(self) -> None:
        # Arrange
        index = (3, -4, 7)

        # Act
        center = index_to_center(index, 0.2)

        # Assert
        assert point_to_index(center, 0.2) == index
        assert np.allclose(center, [0.7, -0.7, 1.5])

    def test_centers_of_index_rows(self) -> None:
        # Arrange
        indices = np.array([[0, 0, 0], [-1, 2, -3]])

        # Act
        centers = index_to_center(indices, 0.2)

        # Assert
        assert centers.shape == (2, 3)
        assert np.allclose(centers, [[0.1, 0.1, 0.1], [-0.1, 0.5, -0.5]])


class TestNeighbors:
    def test_neighbor_counts(self) -> None:
        assert len(NEIGHBOR_OFFSETS) == 26
        assert len(FACE_OFFSETS) == 6

    def test_neighbors26_distances(self) -> None:
        # Act
        neighbors = neighbors26((0, 0, 0), voxel_size=0.5)

        # Assert
        lengths = sorted({round(n.grid_distance, 6) for _, n in neighbors})
        assert lengths == [
            0.5,
            round(0.5 * math.sqrt(2), 6),
            round(0.5 * math.sqrt(3), 6),
        ]
        assert len({index for index, _ in neighbors}) == 26


class TestCastRay:
    def test_axis_aligned_ray(self) -> None:
        # Act
        voxels = cast_ray((0.05, 0.05, 0.05), (0.45, 0.05, 0.05), 0.1)

        # Assert
        assert voxels == [(i, 0, 0) for i in range(5)]

    def test_single_voxel(self) -> None:
        assert cast_ray((0.01, 0.01, 0.01), (0.09, 0.02, 0.03), 0.1) == [(0, 0, 0)]

    def test_diagonal_ray_is_face_connected(self) -> None:
        # Act
        voxels = cast_ray((0.05, 0.05, 0.05), (0.93, 0.71, 0.37), 0.1)

        # Assert
        assert voxels[0] == (0, 0, 0)
        assert voxels[-1] == (9, 7, 3)
        for a, b in zip(voxels, voxels[1:]):
            assert sum(abs(p - q) for p, q in zip(a, b)) == 1
        assert len(voxels) == 1 + 9 + 7 + 3

    def test_negative_direction(self) -> None:
        # Act
        voxels = cast_ray((0.05, 0.05, 0.05), (-0.25, 0.05, 0.05), 0.1)

        # Assert
        assert voxels == [(0, 0, 0), (-1, 0, 0), (-2, 0, 0), (-3, 0, 0)]


class TestTrilinear:
    def test_linear_field_is_reproduced(self) -> None:
        # Arrange
        field = LinearField()
        point = (0.237, 0.512, -0.333)

        # Act
        result = interpolate_trilinear(field, point)

        # Assert
        assert result is not None
        value, gradient = result
        assert value == pytest.approx(2.0 * 0.237 - 0.512 + 0.5 * -0.333)
        assert np.allclose(gradient, [2.0, -1.0, 0.5])

    def test_unknown_support_returns_none(self) -> None:
        # Arrange
        class Sparse(LinearField):
            def scalar_at(self, index: GridIndex) -> Optional[float]:
                if index == (1, 1, 1):
                    return None
                return super().scalar_at(index)

        # Act & Assert
        assert interpolate_trilinear(Sparse(), (0.15, 0.15, 0.15)) is None

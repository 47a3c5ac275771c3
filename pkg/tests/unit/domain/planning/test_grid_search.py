import math

import pytest

from src.domain.mapping.voxel_core import GridIndex
from src.domain.planning.grid_search import grid_astar


def open_space(index: GridIndex) -> bool:
    return all(-5 <= c <= 5 for c in index)


def wall_with_gap(index: GridIndex) -> bool:
    if not open_space(index):
        return False
    return not (index[0] == 0 and index[1] < 4)


class TestGridAstar:
    def test_diagonal_cost(self) -> None:
        # Act
        found = grid_astar((0, 0, 0), (3, 3, 0), open_space, 1000)

        # Assert
        assert found is not None
        path, cost = found
        assert path[0] == (0, 0, 0) and path[-1] == (3, 3, 0)
        assert cost == pytest.approx(3 * math.sqrt(2))

    def test_detour_around_wall(self) -> None:
        # Act
        found = grid_astar((-2, 0, 0), (2, 0, 0), wall_with_gap, 10_000)

        # Assert
        assert found is not None
        path, cost = found
        assert all(wall_with_gap(index) for index in path)
        assert cost > 4.0

    def test_same_cell(self) -> None:
        assert grid_astar((1, 1, 1), (1, 1, 1), open_space, 10) == (
            [(1, 1, 1)],
            0.0,
        )

    def test_blocked_goal(self) -> None:
        assert grid_astar((0, 0, 0), (9, 0, 0), open_space, 1000) is None

    def test_expansion_cap(self) -> None:
        assert grid_astar((-5, -5, -5), (5, 5, 5), open_space, 3) is None

    def test_step_filter(self) -> None:
        # Arrange
        def axis_only(a: GridIndex, b: GridIndex) -> bool:
            return sum(abs(x - y) for x, y in zip(a, b)) == 1

        # Act
        found = grid_astar((0, 0, 0), (2, 2, 0), open_space, 1000, axis_only)

        # Assert
        assert found is not None
        assert found[1] == pytest.approx(4.0)

import numpy as np
import pytest

from src.domain.exceptions import PlanningFailedException
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.grid_planner import astar_esdf
from src.domain.planning.paths import WaypointPath
from src.domain.planning.shortening import shorten_path
from src.domain.simulation.worlds import build_two_room_world

START = (2.1, 0.7, 0.9)
GOAL = (6.3, 0.7, 0.9)


@pytest.fixture(scope="module")
def checker() -> CollisionChecker:
    snapshot = DistanceSnapshot.from_layer(build_two_room_world())
    return CollisionChecker(snapshot, robot_radius=0.3)


@pytest.fixture(scope="module")
def grid_path(checker: CollisionChecker) -> WaypointPath:
    result = astar_esdf(checker, START, GOAL, 500_000)
    assert result.path is not None
    return result.path


class TestShortenPath:
    def test_never_longer_and_valid(
        self, checker: CollisionChecker, grid_path: WaypointPath
    ) -> None:
        # Act
        shortened = shorten_path(checker, grid_path)

        # Assert
        assert shortened.validated
        assert shortened.length <= grid_path.length + 1e-9
        assert len(shortened) < len(grid_path)
        assert np.allclose(shortened.waypoints[0], START)
        assert np.allclose(shortened.waypoints[-1], GOAL)
        for a, b in zip(shortened.waypoints, shortened.waypoints[1:]):
            assert checker.is_motion_valid(a, b)

    def test_idempotent(
        self, checker: CollisionChecker, grid_path: WaypointPath
    ) -> None:
        # Arrange
        once = shorten_path(checker, grid_path)

        # Act
        twice = shorten_path(checker, once)

        # Assert
        assert np.array_equal(once.waypoints, twice.waypoints)

    def test_invalid_segments_are_repaired(self, checker: CollisionChecker) -> None:
        # Arrange
        raw = WaypointPath.from_points([START, GOAL], validated=False)

        # Act
        repaired = shorten_path(checker, raw)

        # Assert
        assert len(repaired) > 2
        for a, b in zip(repaired.waypoints, repaired.waypoints[1:]):
            assert checker.is_motion_valid(a, b)

    def test_unrepairable_segment_raises(self, checker: CollisionChecker) -> None:
        # Arrange
        raw = WaypointPath.from_points([START, (4.1, 0.5, 0.9)], validated=False)

        # Act & Assert
        with pytest.raises(PlanningFailedException):
            shorten_path(checker, raw)

    def test_single_point(self, checker: CollisionChecker) -> None:
        assert len(shorten_path(checker, WaypointPath.from_points([START]))) == 1

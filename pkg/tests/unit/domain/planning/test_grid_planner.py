import numpy as np
import pytest

from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.grid_planner import astar_esdf
from src.domain.simulation.worlds import build_two_room_world

START = (2.1, 0.7, 0.9)
GOAL = (6.3, 0.7, 0.9)


@pytest.fixture(scope="module")
def checker() -> CollisionChecker:
    snapshot = DistanceSnapshot.from_layer(build_two_room_world())
    return CollisionChecker(snapshot, robot_radius=0.3)


class TestAstarEsdf:
    def test_path_through_doorway(self, checker: CollisionChecker) -> None:
        # Act
        result = astar_esdf(checker, START, GOAL, 500_000)

        # Assert
        assert result.success
        assert result.path is not None
        waypoints = result.path.waypoints
        assert np.allclose(waypoints[0], START)
        assert np.allclose(waypoints[-1], GOAL)
        assert all(
            checker.is_motion_valid(a, b) for a, b in zip(waypoints, waypoints[1:])
        )
        assert result.length > np.linalg.norm(np.subtract(GOAL, START))

    def test_blocked_start_fails(self, checker: CollisionChecker) -> None:
        # Act
        result = astar_esdf(checker, (4.1, 0.5, 0.9), GOAL, 500_000)

        # Assert
        assert not result.success
        assert result.message == "no grid path"

    def test_same_voxel(self, checker: CollisionChecker) -> None:
        # Act
        result = astar_esdf(checker, (2.11, 2.11, 0.91), (2.15, 2.12, 0.93), 10)

        # Assert
        assert result.success
        assert result.path is not None
        assert len(result.path) == 2

import numpy as np
import pytest

from src.domain.exceptions import PlanningFailedException
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.skeleton_planner import SkeletonPlanner, plan_skeleton
from src.domain.simulation.worlds import build_two_room_world
from src.domain.topology.sparse_graph import SparseGraph

START = (2.1, 0.7, 0.9)
GOAL = (6.3, 0.7, 0.9)


@pytest.fixture(scope="module")
def checker() -> CollisionChecker:
    snapshot = DistanceSnapshot.from_layer(build_two_room_world())
    return CollisionChecker(snapshot, robot_radius=0.3)


@pytest.fixture
def corridor_graph() -> SparseGraph:
    """Room centers joined through the doorway."""
    graph = SparseGraph(voxel_size=0.2)
    for position in [(2.1, 2.1, 0.9), (4.1, 2.0, 0.9), (6.3, 2.1, 0.9)]:
        graph.add_vertex(position, clearance=0.5)
    graph.add_edge(0, 1)
    graph.add_edge(1, 2)
    return graph


class TestSkeletonPlanner:
    def test_plans_through_the_graph(
        self, checker: CollisionChecker, corridor_graph: SparseGraph
    ) -> None:
        # Act
        result = plan_skeleton(corridor_graph, checker, START, GOAL)

        # Assert
        assert result.success, result.message
        assert result.path is not None and result.raw_path is not None
        assert not result.raw_path.validated
        assert result.path.validated
        assert np.allclose(result.path.waypoints[0], START)
        assert np.allclose(result.path.waypoints[-1], GOAL)
        assert result.path.length <= result.raw_path.length + 1e-9
        for a, b in zip(result.path.waypoints, result.path.waypoints[1:]):
            assert checker.is_motion_valid(a, b)

    def test_disconnected_graph_fails(
        self, checker: CollisionChecker, corridor_graph: SparseGraph
    ) -> None:
        # Arrange
        corridor_graph.remove_vertex(1)

        # Act
        result = SkeletonPlanner(corridor_graph, checker).plan(START, GOAL)

        # Assert
        assert not result.success
        assert "common subgraph" in result.message

    def test_invalid_endpoint(
        self, checker: CollisionChecker, corridor_graph: SparseGraph
    ) -> None:
        # Act
        result = plan_skeleton(corridor_graph, checker, (4.1, 0.5, 0.9), GOAL)

        # Assert
        assert not result.success
        assert result.message == "invalid endpoint"

    def test_empty_graph_is_rejected(self, checker: CollisionChecker) -> None:
        with pytest.raises(PlanningFailedException, match="empty"):
            SkeletonPlanner(SparseGraph(voxel_size=0.2), checker)

import numpy as np
import pytest

from src.common.dto import PlannerConfig
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget, PlanResult
from src.domain.planning.sampling_planners import (
    plan_prm,
    plan_rrt_connect,
    plan_rrt_star,
    plan_straight_line,
)
from src.domain.simulation.worlds import build_two_room_world

START = (2.1, 0.7, 0.9)
GOAL = (6.3, 0.7, 0.9)
BUDGET = PlanningBudget(iterations=3000)


@pytest.fixture(scope="module")
def checker() -> CollisionChecker:
    snapshot = DistanceSnapshot.from_layer(build_two_room_world())
    return CollisionChecker(snapshot, robot_radius=0.3)


@pytest.fixture
def config() -> PlannerConfig:
    return PlannerConfig(robot_radius=0.3)


def assert_valid_path(checker: CollisionChecker, result: PlanResult) -> None:
    assert result.success, result.message
    assert result.path is not None
    waypoints = result.path.waypoints
    assert np.allclose(waypoints[0], START)
    assert np.allclose(waypoints[-1], GOAL)
    for a, b in zip(waypoints, waypoints[1:]):
        assert checker.is_motion_valid(a, b)


class TestStraightLine:
    def test_blocked_line_fails(self, checker: CollisionChecker) -> None:
        # Act
        result = plan_straight_line(checker, START, GOAL)

        # Assert
        assert not result.success
        assert result.message == "straight line blocked"
        assert result.path is not None and not result.path.validated

    def test_open_line_succeeds(self, checker: CollisionChecker) -> None:
        assert plan_straight_line(checker, (2.1, 2.1, 0.9), (6.3, 2.1, 0.9)).success


class TestRrtConnect:
    def test_finds_valid_path(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Act
        result = plan_rrt_connect(checker, START, GOAL, BUDGET, 7, config)

        # Assert
        assert_valid_path(checker, result)
        assert 0 < result.iterations <= 3000

    def test_same_seed_replays(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Act
        first = plan_rrt_connect(checker, START, GOAL, BUDGET, 11, config)
        second = plan_rrt_connect(checker, START, GOAL, BUDGET, 11, config)

        # Assert
        assert first.path is not None and second.path is not None
        assert np.array_equal(first.path.waypoints, second.path.waypoints)

    def test_invalid_start(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Act
        result = plan_rrt_connect(checker, (4.1, 0.5, 0.9), GOAL, BUDGET, 0, config)

        # Assert
        assert not result.success
        assert result.message == "invalid start"

    def test_identical_endpoints(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Act
        result = plan_rrt_connect(checker, START, START, BUDGET, 0, config)

        # Assert
        assert result.success
        assert result.path is not None and len(result.path) == 1

    def test_exhausted_budget_when_doorway_is_too_narrow(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Arrange
        wide = CollisionChecker(checker.snapshot, robot_radius=0.55)

        # Act
        result = plan_rrt_connect(
            wide, START, GOAL, PlanningBudget(iterations=50), 0, config
        )

        # Assert
        assert not result.success
        assert result.message == "budget exhausted"


class TestRrtStar:
    def test_finds_valid_path(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Act
        result = plan_rrt_star(checker, START, GOAL, BUDGET, 3, config)

        # Assert
        assert_valid_path(checker, result)
        assert result.iterations == 3000

    def test_open_goal_is_joined_to_the_root(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Arrange
        start, goal = (2.1, 2.1, 0.9), (3.1, 2.1, 0.9)

        # Act
        result = plan_rrt_star(checker, start, goal, BUDGET, 3, config)

        # Assert
        assert result.success
        assert result.length == pytest.approx(1.0, abs=1e-6)


class TestPrm:
    def test_roadmap_is_built_once(
        self, checker: CollisionChecker, config: PlannerConfig
    ) -> None:
        # Arrange
        query_budget = PlanningBudget(iterations=3000)

        # Act
        first, roadmap = plan_prm(
            checker, START, GOAL, BUDGET, query_budget, 5, config
        )
        nodes = roadmap.node_count
        second, again = plan_prm(
            checker,
            START,
            GOAL,
            BUDGET,
            query_budget,
            5,
            config,
            roadmap,
        )

        # Assert
        assert_valid_path(checker, first)
        assert_valid_path(checker, second)
        assert again is roadmap
        assert roadmap.built
        assert nodes >= config.prm_roadmap_samples
        assert roadmap.node_count == nodes

import numpy as np
import pytest

from src.common.dto import IntermediateStrategy, LocalPlannerConfig
from src.domain.local.replanner import (
    ReplanAction,
    ReplanState,
    replan_step,
    stop_in_place,
    verify_trajectory,
)
from src.domain.local.waypoint_queue import WaypointQueue
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.simulation.worlds import build_two_room_world
from src.domain.trajectory.polynomial import PolynomialSegment, Trajectory

HOME = (1.1, 2.1, 0.9)


@pytest.fixture(scope="module")
def rooms() -> DistanceSnapshot:
    return DistanceSnapshot.from_layer(build_two_room_world())


@pytest.fixture
def hovering() -> ReplanState:
    return ReplanState(Trajectory.stationary(HOME, 2.0), cursor=0.0, lock_horizon=0.5)


def moving_along_x(speed: float, duration: float) -> Trajectory:
    coefficients = np.array([[HOME[0], speed], [HOME[1], 0.0], [HOME[2], 0.0]])
    return Trajectory([PolynomialSegment(coefficients, duration)])


class TestReplanState:
    def test_prefix_ends_at_lock_time(self, hovering: ReplanState) -> None:
        # Act
        prefix = hovering.locked_prefix()

        # Assert
        assert prefix.end_time == pytest.approx(0.5)

    def test_prefix_is_held_past_the_active_end(self) -> None:
        # Arrange
        state = ReplanState(moving_along_x(0.5, 1.0), cursor=0.8, lock_horizon=0.5)

        # Act
        prefix = state.locked_prefix()

        # Assert
        assert prefix.end_time == pytest.approx(1.3)
        assert prefix.evaluate(1.3) == pytest.approx([1.6, 2.1, 0.9])
        assert prefix.evaluate(0.5) == pytest.approx([1.35, 2.1, 0.9])


class TestVerifyTrajectory:
    def test_clear_trajectory(self, rooms: DistanceSnapshot) -> None:
        # Act
        hit = verify_trajectory(Trajectory.stationary(HOME, 1.0), rooms, 0.35, 5.0)

        # Assert
        assert hit is None

    def test_reports_first_bad_time_after_cursor(
        self, rooms: DistanceSnapshot
    ) -> None:
        # Arrange
        coefficients = np.array([[2.1, 1.0], [0.7, 0.0], [0.9, 0.0]])
        towards_wall = Trajectory([PolynomialSegment(coefficients, 2.0)])

        # Act
        hit = verify_trajectory(towards_wall, rooms, 0.35, 5.0, cursor=0.5, dt=0.1)

        # Assert
        assert hit is not None
        assert 0.5 < hit < 2.0

    def test_horizon_limits_the_check(self, rooms: DistanceSnapshot) -> None:
        # Arrange
        coefficients = np.array([[2.1, 1.0], [0.7, 0.0], [0.9, 0.0]])
        towards_wall = Trajectory([PolynomialSegment(coefficients, 2.0)])

        # Assert
        assert verify_trajectory(towards_wall, rooms, 0.35, 0.5, dt=0.1) is None


class TestStopInPlace:
    def test_prefix_at_rest_is_returned(
        self, rooms: DistanceSnapshot, hovering: ReplanState
    ) -> None:
        # Arrange
        prefix = hovering.locked_prefix()

        # Act
        stopped = stop_in_place(prefix, rooms, LocalPlannerConfig())

        # Assert
        assert stopped is prefix

    def test_brakes_along_heading(self, rooms: DistanceSnapshot) -> None:
        # Arrange
        prefix = moving_along_x(0.5, 1.0)

        # Act
        stopped = stop_in_place(prefix, rooms, LocalPlannerConfig())

        # Assert
        assert stopped is not None
        assert stopped.end_time == pytest.approx(2.0)
        assert stopped.evaluate(2.0) == pytest.approx([1.85, 2.1, 0.9], abs=1e-6)
        assert stopped.evaluate(2.0, 1) == pytest.approx([0, 0, 0], abs=1e-6)
        assert stopped.evaluate(1.0, 1) == pytest.approx([0.5, 0, 0], abs=1e-6)


class TestReplanStep:
    def test_empty_queue_holds_clear_trajectory(
        self, rooms: DistanceSnapshot, hovering: ReplanState
    ) -> None:
        # Act
        outcome = replan_step(
            hovering,
            rooms,
            WaypointQueue(0.2),
            LocalPlannerConfig(),
            np.random.default_rng(0),
        )

        # Assert
        assert outcome.action == ReplanAction.HOLD
        assert outcome.trajectory is hovering.trajectory

    def test_smooths_through_visible_waypoints(
        self, rooms: DistanceSnapshot, hovering: ReplanState
    ) -> None:
        # Arrange
        queue = WaypointQueue(0.2)
        queue.extend([(2.1, 2.1, 0.9), (3.1, 2.1, 0.9)])

        # Act
        outcome = replan_step(
            hovering, rooms, queue, LocalPlannerConfig(), np.random.default_rng(0)
        )

        # Assert
        trajectory = outcome.trajectory
        assert outcome.action == ReplanAction.SMOOTH
        assert outcome.suffix_duration > 0
        assert trajectory.evaluate(0.25) == pytest.approx(HOME)
        assert trajectory.evaluate(trajectory.end_time) == pytest.approx(
            [3.1, 2.1, 0.9], abs=1e-6
        )

    def test_single_waypoint_uses_shotgun(
        self, rooms: DistanceSnapshot, hovering: ReplanState
    ) -> None:
        # Arrange
        queue = WaypointQueue(0.2)
        queue.add((3.1, 2.1, 0.9))

        # Act
        outcome = replan_step(
            hovering, rooms, queue, LocalPlannerConfig(), np.random.default_rng(0)
        )

        # Assert
        end = outcome.trajectory.evaluate(outcome.trajectory.end_time)
        assert outcome.action == ReplanAction.SHOTGUN
        assert np.linalg.norm(end - np.array([3.1, 2.1, 0.9])) < 0.2

    def test_direct_line_without_shotgun(
        self, rooms: DistanceSnapshot, hovering: ReplanState
    ) -> None:
        # Arrange
        queue = WaypointQueue(0.2)
        queue.add((3.1, 2.1, 0.9))
        config = LocalPlannerConfig(use_shotgun=False)

        # Act
        outcome = replan_step(
            hovering, rooms, queue, config, np.random.default_rng(0)
        )

        # Assert
        end = outcome.trajectory.evaluate(outcome.trajectory.end_time)
        assert outcome.action == ReplanAction.SMOOTH
        assert end == pytest.approx([3.1, 2.1, 0.9], abs=1e-6)

    def test_blocked_robot_stops_in_place(self, rooms: DistanceSnapshot) -> None:
        # Arrange
        state = ReplanState(
            Trajectory.stationary((2.1, 2.1, 0.9), 2.0), cursor=0.0, lock_horizon=0.5
        )
        queue = WaypointQueue(0.2)
        queue.add((3.1, 2.1, 0.9))
        config = LocalPlannerConfig(robot_radius=1.0)

        # Act
        outcome = replan_step(state, rooms, queue, config, np.random.default_rng(0))

        # Assert
        assert outcome.action == ReplanAction.STOP
        assert outcome.message == "stop in place"
        assert outcome.trajectory.end_time == pytest.approx(0.5)

    def test_failed_intermediate_goal_is_discarded(
        self, rooms: DistanceSnapshot
    ) -> None:
        # Arrange
        state = ReplanState(
            Trajectory.stationary((2.1, 2.1, 0.9), 2.0), cursor=0.0, lock_horizon=0.5
        )
        queue = WaypointQueue(0.2)
        queue.add((3.1, 2.1, 0.9))
        config = LocalPlannerConfig(
            robot_radius=1.0, intermediate_strategy=IntermediateStrategy.RANDOM
        )

        # Act
        outcome = replan_step(state, rooms, queue, config, np.random.default_rng(0))

        # Assert
        assert outcome.action == ReplanAction.STOP
        assert not queue.has_intermediate()
        assert len(queue) == 1

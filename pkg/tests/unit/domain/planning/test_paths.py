import pytest

from src.domain.planning.paths import PlanningBudget, PlanResult, WaypointPath


class TestWaypointPath:
    def test_repeated_points_are_dropped(self) -> None:
        # Act
        path = WaypointPath.from_points([(0, 0, 0), (0, 0, 0), (3, 4, 0)])

        # Assert
        assert len(path) == 2
        assert path.length == pytest.approx(5.0)

    def test_single_point_has_zero_length(self) -> None:
        assert WaypointPath.from_points([(1, 2, 3)]).length == 0.0

    def test_failed_result_has_zero_length(self) -> None:
        assert PlanResult(False).length == 0.0


class TestPlanningBudget:
    def test_deterministic_budget_counts_iterations(self) -> None:
        # Act
        budget = PlanningBudget.from_seconds(0.5, True, iterations_per_second=100)

        # Assert
        assert budget == PlanningBudget(iterations=50)

    def test_wall_clock_budget(self) -> None:
        assert PlanningBudget.from_seconds(0.5, False, 100).seconds == 0.5

    def test_clock_ticks_until_exhausted(self) -> None:
        # Arrange
        clock = PlanningBudget(iterations=3).clock()

        # Act
        ticks = [clock.tick() for _ in range(5)]

        # Assert
        assert ticks == [True, True, True, False, False]
        assert clock.count == 3

    def test_unbounded_budget_is_exhausted(self) -> None:
        assert PlanningBudget().clock().exhausted

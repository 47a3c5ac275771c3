from typing import Tuple

import numpy as np
import pytest

from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.audit import (
    audit_times,
    check_feasibility,
    collision_free,
    first_collision,
)
from src.domain.trajectory.polynomial import Trajectory
from src.domain.trajectory.velocity_ramp import velocity_ramp


class SphereField:
    def __init__(self, center: Tuple[float, float, float], radius: float) -> None:
        self.center = np.asarray(center, dtype=np.float64)
        self.radius = radius

    def interpolate_many(self, points: FloatArray) -> Tuple[FloatArray, FloatArray]:
        offsets = np.atleast_2d(points) - self.center
        norms = np.linalg.norm(offsets, axis=1)
        return norms - self.radius, offsets / norms[:, None]


class UnknownField:
    def interpolate_many(self, points: FloatArray) -> Tuple[FloatArray, FloatArray]:
        points = np.atleast_2d(points)
        return np.full(len(points), np.nan), np.zeros_like(points)


@pytest.fixture
def straight() -> Trajectory:
    return velocity_ramp(WaypointPath.from_points([(0, 0, 0), (4, 0, 0)]), 1.0, 1.0)


class TestAuditTimes:
    def test_end_time_is_always_included(self, straight: Trajectory) -> None:
        # Act
        times = audit_times(straight, 0.3)

        # Assert
        assert times[0] == 0.0
        assert times[-1] == pytest.approx(5.0)
        assert np.all(np.diff(times) <= 0.3 + 1e-12)

    def test_window(self, straight: Trajectory) -> None:
        assert audit_times(straight, 0.5, start=1.0, end=2.0) == pytest.approx(
            [1.0, 1.5, 2.0]
        )
        assert len(audit_times(straight, 0.5, start=3.0, end=2.0)) == 0


class TestFirstCollision:
    def test_hit_at_first_bad_sample(self, straight: Trajectory) -> None:
        # Act
        hit = first_collision(straight, SphereField((2, 0.5, 0), 0.2), 0.4, 0.01)

        # Assert
        assert hit is not None
        assert hit.clearance is not None and hit.clearance < 0.4
        assert 1.0 < hit.time < 2.5
        assert hit.position[0] < 2.0

    def test_clear_trajectory(self, straight: Trajectory) -> None:
        assert collision_free(straight, SphereField((2, 3, 0), 0.5), 0.5)

    def test_unknown_space_collides(self, straight: Trajectory) -> None:
        # Act
        hit = first_collision(straight, UnknownField(), 0.1, 0.01)

        # Assert
        assert hit is not None
        assert hit.time == 0.0
        assert hit.clearance is None


class TestFeasibility:
    def test_within_limits(self, straight: Trajectory) -> None:
        assert check_feasibility(straight, 1.0, 1.0).ok

    def test_reports_first_violation(self, straight: Trajectory) -> None:
        # Act
        report = check_feasibility(straight, 0.5, 2.0)

        # Assert
        assert not report.ok
        assert report.limit == "velocity"
        assert report.time == pytest.approx(0.501, abs=2e-3)

    def test_acceleration_violation(self, straight: Trajectory) -> None:
        # Act
        report = check_feasibility(straight, 2.0, 0.5)

        # Assert
        assert report.limit == "acceleration"
        assert report.time == 0.0
        assert report.value == pytest.approx(1.0)

    def test_missing_trajectory_is_feasible(self) -> None:
        assert check_feasibility(None, 1.0, 1.0).ok

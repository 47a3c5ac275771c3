import logging
from typing import Optional

import numpy as np

from src.common.dto import SmoothingConfig
from src.domain.exceptions import SmoothingFailedException
from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.audit import DistanceField, first_collision
from src.domain.trajectory.polynomial import Trajectory
from src.domain.trajectory.spline_problem import (
    allocate_segment_times,
    fit_polynomial,
)

logger = logging.getLogger()


def _split_point(a: FloatArray, b: FloatArray, hit: FloatArray) -> FloatArray:
    """Projection of the hit onto segment a-b, or its midpoint at the ends."""
    direction = b - a
    length_sq = float(direction @ direction)
    t = float((hit - a) @ direction) / length_sq if length_sq > 0 else 0.5
    if t <= 1e-6 or t >= 1 - 1e-6:
        t = 0.5
    return a + t * direction  # type: ignore[no-any-return]


def smooth_polynomial_split(
    path: WaypointPath,
    field: DistanceField,
    config: SmoothingConfig,
    start_time: float = 0.0,
    start_state: Optional[FloatArray] = None,
) -> Trajectory:
    """Fit a minimum-derivative spline and split segments that collide.

    Each colliding segment gets a new waypoint on its straight-line chord,
    nearest to the first colliding sample, and the spline is refit.
    """
    points = np.asarray(path.waypoints, dtype=np.float64)
    if len(points) < 2:
        return Trajectory.stationary(points[0], config.min_segment_time, start_time)
    for split in range(config.max_splits + 1):
        times = allocate_segment_times(
            points, config.v_max, config.a_max, config.min_segment_time
        )
        trajectory = fit_polynomial(
            points,
            times,
            config.derivative_order,
            start_state=start_state,
            start_time=start_time,
        )
        hit = first_collision(
            trajectory, field, config.robot_radius, config.check_dt
        )
        if hit is None:
            logger.debug(f"Polynomial fit collision-free after {split} splits")
            return trajectory
        segment, _ = trajectory.segment_at(hit.time)
        inserted = _split_point(points[segment], points[segment + 1], hit.position)
        points = np.insert(points, segment + 1, inserted, axis=0)
    raise SmoothingFailedException(
        f"trajectory still in collision after {config.max_splits} splits"
    )

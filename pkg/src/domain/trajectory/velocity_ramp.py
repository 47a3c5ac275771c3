import logging
import math
from typing import List

import numpy as np

from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.polynomial import PolynomialSegment, Trajectory

logger = logging.getLogger()

_STATIONARY_DURATION = 1e-3


def _line_piece(
    start: FloatArray,
    direction: FloatArray,
    speed: float,
    accel: float,
    duration: float,
) -> PolynomialSegment:
    coefficients = np.stack(
        [start, direction * speed, 0.5 * accel * direction], axis=1
    )
    return PolynomialSegment(coefficients, duration)


def velocity_ramp(
    path: WaypointPath, v_max: float, a_max: float, start_time: float = 0.0
) -> Trajectory:
    """Straight-line pieces with a rest-to-rest trapezoidal speed profile.

    Segments too short to reach v_max use the triangular profile, so
    acceleration limits hold everywhere. The result is continuous in
    velocity but not in acceleration.
    """
    if v_max <= 0 or a_max <= 0:
        raise ValueError("v_max and a_max must be positive")
    points = np.asarray(path.waypoints, dtype=np.float64)
    pieces: List[PolynomialSegment] = []
    for a, b in zip(points[:-1], points[1:]):
        length = float(np.linalg.norm(b - a))
        if length <= 1e-12:
            continue
        direction = (b - a) / length
        if length >= v_max * v_max / a_max:
            accel_time = v_max / a_max
            accel_length = 0.5 * v_max * accel_time
            cruise_time = (length - 2 * accel_length) / v_max
            peak = v_max
        else:
            accel_time = math.sqrt(length / a_max)
            accel_length = 0.5 * length
            cruise_time = 0.0
            peak = a_max * accel_time
        pieces.append(_line_piece(a, direction, 0.0, a_max, accel_time))
        cruise_start = a + direction * accel_length
        if cruise_time > 1e-12:
            pieces.append(_line_piece(cruise_start, direction, peak, 0.0, cruise_time))
        decel_start = b - direction * accel_length
        pieces.append(_line_piece(decel_start, direction, peak, -a_max, accel_time))
    if not pieces:
        return Trajectory.stationary(points[0], _STATIONARY_DURATION, start_time)
    return Trajectory(pieces, start_time)

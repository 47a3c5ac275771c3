import logging
from dataclasses import dataclass
from typing import Optional, Protocol, Tuple

import numpy as np

from src.domain.mapping.voxel_core import FloatArray
from src.domain.trajectory.polynomial import Trajectory

logger = logging.getLogger()

_TOLERANCE = 1e-9


class DistanceField(Protocol):
    """Anything that answers batched (distance, gradient) queries.

    Rows whose distance is unknown come back as NaN.
    """

    def interpolate_many(
        self, points: FloatArray
    ) -> Tuple[FloatArray, FloatArray]: ...


@dataclass(frozen=True)
class CollisionHit:
    time: float
    position: FloatArray
    clearance: Optional[float] = None


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    time: Optional[float] = None
    limit: Optional[str] = None
    value: Optional[float] = None


def audit_times(
    trajectory: Trajectory,
    dt: float,
    start: Optional[float] = None,
    end: Optional[float] = None,
) -> FloatArray:
    """Sample times every dt from start, always including the end time."""
    first = trajectory.start_time
    if start is not None:
        first = max(start, trajectory.start_time)
    last = trajectory.end_time if end is None else min(end, trajectory.end_time)
    if last < first:
        return np.zeros(0)
    count = int(np.floor((last - first) / dt + _TOLERANCE)) + 1
    times = first + dt * np.arange(count)
    if last - times[-1] > _TOLERANCE:
        times = np.append(times, last)
    return times


def first_collision(
    trajectory: Trajectory,
    field: DistanceField,
    robot_radius: float,
    dt: float,
    start: Optional[float] = None,
    end: Optional[float] = None,
) -> Optional[CollisionHit]:
    """First sample that is unknown or closer than robot_radius to a surface."""
    times = audit_times(trajectory, dt, start, end)
    if len(times) == 0:
        return None
    positions = trajectory.evaluate_many(times)
    values, _ = field.interpolate_many(positions)
    with np.errstate(invalid="ignore"):
        bad = np.isnan(values) | (values < robot_radius - _TOLERANCE)
    if not np.any(bad):
        return None
    i = int(np.argmax(bad))
    clearance = None if np.isnan(values[i]) else float(values[i])
    return CollisionHit(
        time=float(times[i]),
        position=positions[i],
        clearance=clearance,
    )


def collision_free(
    trajectory: Trajectory,
    field: DistanceField,
    robot_radius: float,
    dt: float = 0.001,
) -> bool:
    return first_collision(trajectory, field, robot_radius, dt) is None


def check_feasibility(
    trajectory: Optional[Trajectory],
    v_max: float,
    a_max: float,
    dt: float = 0.001,
    tolerance: float = 1e-6,
) -> FeasibilityReport:
    if trajectory is None:
        return FeasibilityReport(ok=True)
    times = audit_times(trajectory, dt)
    speeds = np.linalg.norm(trajectory.evaluate_many(times, 1), axis=1)
    accelerations = np.linalg.norm(trajectory.evaluate_many(times, 2), axis=1)
    violations = [
        (int(np.argmax(exceeded)), limit, values)
        for limit, values, bound in (
            ("velocity", speeds, v_max),
            ("acceleration", accelerations, a_max),
        )
        for exceeded in [values > bound * (1 + tolerance) + tolerance]
        if np.any(exceeded)
    ]
    if not violations:
        return FeasibilityReport(ok=True)
    index, limit, values = min(violations, key=lambda v: v[0])
    return FeasibilityReport(
        ok=False, time=float(times[index]), limit=limit, value=float(values[index])
    )

"""Piecewise polynomial trajectories with absolute timestamps."""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.domain.mapping.voxel_core import FloatArray

_TIME_TOLERANCE = 1e-9


def derivative_basis(t: FloatArray, n_coefficients: int, order: int) -> FloatArray:
    """Rows of d^order/dt^order [1, t, t^2, ...] evaluated at each t."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    basis = np.zeros((len(t), n_coefficients))
    for j in range(order, n_coefficients):
        factor = math.factorial(j) / math.factorial(j - order)
        basis[:, j] = factor * t ** (j - order)
    return basis


@dataclass(frozen=True)
class PolynomialSegment:
    """K x (N+1) ascending coefficients valid on [0, duration]."""

    coefficients: FloatArray
    duration: float

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError("segment duration must be positive")

    @property
    def dimension(self) -> int:
        return int(self.coefficients.shape[0])

    def evaluate_many(self, t: FloatArray, order: int = 0) -> FloatArray:
        basis = derivative_basis(t, self.coefficients.shape[1], order)
        return basis @ self.coefficients.T  # type: ignore[no-any-return]

    def evaluate(self, t: float, order: int = 0) -> FloatArray:
        return self.evaluate_many(np.array([t]), order)[0]

    def with_duration(self, duration: float) -> "PolynomialSegment":
        return PolynomialSegment(self.coefficients, duration)


@dataclass
class TrajectorySamples:
    times: FloatArray
    positions: FloatArray
    velocities: FloatArray
    accelerations: FloatArray
    yaws: FloatArray

    def __len__(self) -> int:
        return len(self.times)


@dataclass
class Trajectory:
    segments: List[PolynomialSegment]
    start_time: float = 0.0

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a trajectory needs at least one segment")
        self._boundaries = np.concatenate(
            [[0.0], np.cumsum([s.duration for s in self.segments])]
        )

    @classmethod
    def stationary(
        cls, position: Sequence[float], duration: float, start_time: float = 0.0
    ) -> "Trajectory":
        coefficients = np.asarray(position, dtype=np.float64).reshape(-1, 1)
        return cls([PolynomialSegment(coefficients, duration)], start_time)

    @property
    def dimension(self) -> int:
        return self.segments[0].dimension

    @property
    def duration(self) -> float:
        return float(self._boundaries[-1])

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    @property
    def segment_times(self) -> List[float]:
        return [s.duration for s in self.segments]

    def segment_at(self, time: float) -> Tuple[int, float]:
        """Segment index and local time for an absolute time, clamped."""
        local = min(max(time - self.start_time, 0.0), self.duration)
        index = int(np.searchsorted(self._boundaries, local, side="right") - 1)
        index = min(max(index, 0), len(self.segments) - 1)
        return index, local - float(self._boundaries[index])

    def evaluate_many(self, times: FloatArray, order: int = 0) -> FloatArray:
        times = np.atleast_1d(np.asarray(times, dtype=np.float64))
        local = np.clip(times - self.start_time, 0.0, self.duration)
        indices = np.searchsorted(self._boundaries, local, side="right") - 1
        indices = np.clip(indices, 0, len(self.segments) - 1)
        result = np.zeros((len(times), self.dimension))
        for index in np.unique(indices):
            mask = indices == index
            offset = local[mask] - self._boundaries[index]
            result[mask] = self.segments[int(index)].evaluate_many(offset, order)
        return result

    def evaluate(self, time: float, order: int = 0) -> FloatArray:
        return self.evaluate_many(np.array([time]), order)[0]

    def state_at(self, time: float) -> Tuple[FloatArray, FloatArray, FloatArray]:
        return (
            self.evaluate(time, 0),
            self.evaluate(time, 1),
            self.evaluate(time, 2),
        )

    def sample_times(self, dt: float) -> FloatArray:
        count = int(math.floor(self.duration / dt + _TIME_TOLERANCE)) + 1
        return self.start_time + dt * np.arange(count)

    def truncated(self, time: float) -> "Trajectory":
        """Prefix up to an absolute time; kept coefficients are unchanged."""
        index, local = self.segment_at(time)
        kept = list(self.segments[:index])
        if local > _TIME_TOLERANCE:
            kept.append(self.segments[index].with_duration(local))
        if not kept:
            return Trajectory.stationary(
                self.evaluate(time), _TIME_TOLERANCE, self.start_time
            )
        return Trajectory(kept, self.start_time)

    def appended(self, suffix: "Trajectory") -> "Trajectory":
        if abs(suffix.start_time - self.end_time) > 1e-6:
            raise ValueError("suffix must start where the trajectory ends")
        return Trajectory(self.segments + suffix.segments, self.start_time)

    def shifted(self, start_time: float) -> "Trajectory":
        return Trajectory(list(self.segments), start_time)

    def length(self, dt: float = 0.01) -> float:
        positions = self.evaluate_many(self.sample_times(dt))
        positions = np.vstack([positions, self.evaluate(self.end_time)])
        return float(np.linalg.norm(np.diff(positions, axis=0), axis=1).sum())


def yaw_profile(
    velocities: FloatArray,
    dt: float,
    initial_yaw: Optional[float] = None,
    max_rate: float = math.pi / 2,
    min_speed: float = 0.1,
) -> FloatArray:
    """Face the direction of travel with a yaw-rate limit; hold when slow."""
    yaws = np.zeros(len(velocities))
    current = initial_yaw
    max_step = max_rate * dt
    for i, velocity in enumerate(velocities):
        speed = math.hypot(velocity[0], velocity[1])
        if current is None:
            current = 0.0
            if speed >= min_speed:
                current = math.atan2(velocity[1], velocity[0])
        elif speed >= min_speed:
            target = math.atan2(velocity[1], velocity[0])
            delta = (target - current + math.pi) % (2 * math.pi) - math.pi
            current += min(max(delta, -max_step), max_step)
            current = (current + math.pi) % (2 * math.pi) - math.pi
        yaws[i] = current
    return yaws


def sample_trajectory(
    trajectory: Trajectory, dt: float, initial_yaw: Optional[float] = None
) -> TrajectorySamples:
    if dt <= 0:
        raise ValueError("dt must be positive")
    times = trajectory.sample_times(dt)
    velocities = trajectory.evaluate_many(times, 1)
    return TrajectorySamples(
        times=times,
        positions=trajectory.evaluate_many(times, 0),
        velocities=velocities,
        accelerations=trajectory.evaluate_many(times, 2),
        yaws=yaw_profile(velocities, dt, initial_yaw),
    )

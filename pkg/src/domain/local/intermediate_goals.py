"""Temporary goals used when the planner cannot reach the next waypoint."""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.common.dto import CameraConfig, ExplorationConfig
from src.domain.exceptions import NoCandidatesException
from src.domain.mapping.distance_snapshot import BoolArray, DistanceSnapshot
from src.domain.mapping.voxel_core import FloatArray, index_to_center

logger = logging.getLogger()


def vertical_fov(camera: CameraConfig) -> float:
    """Vertical field of view in radians, derived from the aspect ratio."""
    half = math.radians(camera.horizontal_fov_deg) / 2.0
    return 2.0 * math.atan(math.tan(half) * camera.height / camera.width)


def frustum_volume(camera: CameraConfig) -> float:
    """Volume of the rectangular view pyramid up to max range."""
    tan_h = math.tan(math.radians(camera.horizontal_fov_deg) / 2.0)
    tan_v = math.tan(vertical_fov(camera) / 2.0)
    return 4.0 / 3.0 * camera.max_range**3 * tan_h * tan_v


def sample_in_ball(
    center: Sequence[float], radius: float, rng: np.random.Generator
) -> FloatArray:
    point = np.asarray(center, dtype=np.float64)
    if radius <= 0:
        return point.copy()
    direction = rng.normal(size=3)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        return point.copy()
    scale = radius * float(rng.random()) ** (1.0 / 3.0)
    return point + direction / norm * scale  # type: ignore[no-any-return]


def select_random_intermediate_goal(
    pose: Sequence[float], radius: float, rng: np.random.Generator
) -> FloatArray:
    """Uniform sample in the ball around pose; free space is not required."""
    return sample_in_ball(pose, radius, rng)


def _frustum_centers(
    position: FloatArray, yaw: float, camera: CameraConfig, voxel_size: float
) -> FloatArray:
    reach = camera.max_range
    lower = np.floor((position - reach) / voxel_size).astype(np.int64)
    upper = np.floor((position + reach) / voxel_size).astype(np.int64) + 1
    axes = [np.arange(lo, hi) for lo, hi in zip(lower, upper)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    centers = index_to_center(grid, voxel_size)
    relative = centers - position
    cos_yaw, sin_yaw = math.cos(yaw), math.sin(yaw)
    forward = relative[:, 0] * cos_yaw + relative[:, 1] * sin_yaw
    lateral = -relative[:, 0] * sin_yaw + relative[:, 1] * cos_yaw
    tan_h = math.tan(math.radians(camera.horizontal_fov_deg) / 2.0)
    tan_v = math.tan(vertical_fov(camera) / 2.0)
    inside = (
        (forward > 0)
        & (forward <= reach)
        & (np.abs(lateral) <= forward * tan_h)
        & (np.abs(relative[:, 2]) <= forward * tan_v)
    )
    return centers[inside]  # type: ignore[no-any-return]


def _visible(
    snapshot: DistanceSnapshot, position: FloatArray, targets: FloatArray
) -> BoolArray:
    """Mask of targets whose line of sight crosses no observed occupied voxel."""
    if len(targets) == 0:
        return np.zeros(0, dtype=bool)
    vs = snapshot.voxel_size
    offsets = targets - position
    steps = int(np.ceil(np.linalg.norm(offsets, axis=1).max() / (0.5 * vs)))
    fractions = np.arange(1, steps) / steps
    visible = np.ones(len(targets), dtype=bool)
    for fraction in fractions:
        samples = position + offsets * fraction
        indices = np.floor(samples / vs).astype(np.int64)
        values = snapshot.values_at_indices(indices)
        with np.errstate(invalid="ignore"):
            visible &= ~(values < 0)
    return visible


def frustum_unknown_count(
    snapshot: DistanceSnapshot,
    position: Sequence[float],
    yaw: float,
    camera: CameraConfig,
    occlusion: bool = False,
) -> int:
    """Unobserved voxels whose centers lie in the camera's view pyramid."""
    origin = np.asarray(position, dtype=np.float64)
    vs = snapshot.voxel_size
    centers = _frustum_centers(origin, yaw, camera, vs)
    indices = np.floor(centers / vs).astype(np.int64)
    unknown = np.isnan(snapshot.values_at_indices(indices))
    if occlusion:
        unknown[unknown] &= _visible(snapshot, origin, centers[unknown])
    return int(unknown.sum())


@dataclass(frozen=True)
class ExplorationGoal:
    position: FloatArray
    yaw: float
    reward: float


def _free_candidates(
    snapshot: DistanceSnapshot,
    start: FloatArray,
    config: ExplorationConfig,
    robot_radius: float,
    rng: np.random.Generator,
) -> FloatArray:
    found = []
    for _ in range(config.max_attempts):
        point = sample_in_ball(start, config.radius, rng)
        value = snapshot.distance_at_point(point)
        if value is not None and value >= robot_radius:
            found.append(point)
            if len(found) == config.samples:
                break
    return np.asarray(found, dtype=np.float64).reshape(-1, 3)


def select_exploration_goal(
    snapshot: DistanceSnapshot,
    start: Sequence[float],
    goal: Sequence[float],
    config: ExplorationConfig,
    camera: CameraConfig,
    robot_radius: float,
    rng: np.random.Generator,
) -> ExplorationGoal:
    """Free-space candidate and heading maximising exploration gain plus progress.

    The reward is gain_weight * unknown_in_view plus progress_weight times the
    fraction of reach = |goal - start| + radius closed by the candidate.
    """
    x_s = np.asarray(start, dtype=np.float64)
    g = np.asarray(goal, dtype=np.float64)
    candidates = _free_candidates(snapshot, x_s, config, robot_radius, rng)
    if len(candidates) == 0:
        raise NoCandidatesException(
            f"no free sample within {config.radius} m of {x_s.tolist()}"
        )
    reach = float(np.linalg.norm(g - x_s)) + config.radius
    count = config.yaw_candidates
    yaws = [2.0 * math.pi * k / count for k in range(count)]
    best = ExplorationGoal(candidates[0], 0.0, -math.inf)
    for candidate in candidates:
        remaining = float(np.linalg.norm(g - candidate))
        progress = config.progress_weight * (reach - remaining) / reach
        for yaw in yaws:
            gain = 0
            if config.gain_weight > 0:
                gain = frustum_unknown_count(
                    snapshot, candidate, yaw, camera, config.occlusion
                )
            reward = config.gain_weight * gain + progress
            if reward > best.reward:
                best = ExplorationGoal(candidate, yaw, reward)
    logger.debug(
        f"Exploration goal {best.position.tolist()} yaw {best.yaw:.2f} "
        f"reward {best.reward:.3f} from {len(candidates)} candidates"
    )
    return best

"""Incremental ESDF maintenance over a TSDF layer.

Each update cycle runs three stages: propagate (copy the fixed band out of
the TSDF and queue changed voxels), raise (invalidate stale distance trees)
and lower (re-expand distances as a FIFO wavefront).

A voxel lowered across a sign change is a ``crossing`` root whose parent
points at the neighbour on the other side, so raising that neighbour
reaches it. The full-Euclidean metric ends each cycle with an exact
nearest-seed pass.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import numpy.typing as npt
from scipy.spatial import cKDTree

from src.common.dto import DistanceMetric, EsdfConfig
from src.domain.exceptions import InvalidLayerException
from src.domain.mapping.voxel_core import (
    FloatArray,
    GridIndex,
    index_to_center,
    interpolate_trilinear,
    neighbors26,
    point_to_index,
)
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer

logger = logging.getLogger()

_ZERO: GridIndex = (0, 0, 0)


@dataclass
class Wavefronts:
    lower: Deque[GridIndex] = field(default_factory=deque)
    raise_: Deque[GridIndex] = field(default_factory=deque)
    in_lower: Set[GridIndex] = field(default_factory=set)
    raised: Set[GridIndex] = field(default_factory=set)

    def push_lower(self, index: GridIndex) -> None:
        if index not in self.in_lower:
            self.in_lower.add(index)
            self.lower.append(index)

    def push_raise(self, index: GridIndex) -> None:
        if index not in self.raised:
            self.raised.add(index)
            self.raise_.append(index)

    def pop_lower(self) -> GridIndex:
        index = self.lower.popleft()
        self.in_lower.discard(index)
        return index


@dataclass
class EsdfUpdateSummary:
    lowered: int = 0
    raised: int = 0


def _sign(value: float) -> float:
    return 1.0 if value >= 0.0 else -1.0


def _parent_of(voxel: np.void) -> GridIndex:
    parent = voxel["parent"]
    return (int(parent[0]), int(parent[1]), int(parent[2]))


def _add(a: GridIndex, b: GridIndex) -> GridIndex:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _reset_distance(voxel: np.void, config: EsdfConfig, voxel_size: float) -> float:
    distance = float(voxel["distance"])
    if voxel["hallucinated"]:
        return config.clear_radius if distance > 0 else -voxel_size
    return _sign(distance) * config.default_distance


def _check_layers(tsdf: VoxelLayer, esdf: VoxelLayer) -> None:
    if tsdf.kind != VoxelKind.TSDF or esdf.kind != VoxelKind.ESDF:
        raise InvalidLayerException("Expected a TSDF and an ESDF layer.")
    if not math.isclose(tsdf.voxel_size, esdf.voxel_size):
        raise InvalidLayerException("TSDF and ESDF voxel sizes differ.")


def propagate_from_tsdf(
    tsdf: VoxelLayer,
    esdf: VoxelLayer,
    updated: Iterable[GridIndex],
    config: EsdfConfig,
) -> Wavefronts:
    fronts = Wavefronts()
    band = config.fixed_band_radius
    for index in sorted(updated):
        tsdf_voxel = tsdf.get_voxel(index)
        if tsdf_voxel is None or tsdf_voxel["weight"] <= 0:
            continue
        distance = float(tsdf_voxel["distance"])
        voxel = esdf.get_or_allocate(index)
        was_hallucinated = bool(voxel["hallucinated"])
        was_observed = bool(voxel["observed"]) and not was_hallucinated
        was_fixed = bool(voxel["fixed"])
        old = float(voxel["distance"])
        voxel["observed"] = 1
        voxel["hallucinated"] = 0

        if abs(distance) < band:
            voxel["fixed"] = 1
            voxel["crossing"] = 0
            voxel["parent"] = _ZERO
            voxel["distance"] = distance
            if was_hallucinated:
                fronts.push_raise(index)
            elif not was_observed:
                fronts.push_lower(index)
            elif was_fixed and old == distance:
                continue
            elif (
                was_fixed
                and abs(distance) < abs(old)
                and _sign(old) == _sign(distance)
            ):
                fronts.push_lower(index)
            else:
                # a voxel turning fixed stops feeding zero crossings
                fronts.push_raise(index)
            continue

        sign = _sign(distance)
        if was_fixed or not was_observed or _sign(old) != sign:
            voxel["fixed"] = 0
            voxel["crossing"] = 0
            voxel["distance"] = sign * config.default_distance
            if not was_observed:
                voxel["parent"] = _ZERO
            fronts.push_raise(index)
    return fronts


def process_raise(
    esdf: VoxelLayer, fronts: Wavefronts, config: EsdfConfig
) -> Set[GridIndex]:
    full = config.metric == DistanceMetric.FULL_EUCLIDEAN
    invalidated: Set[GridIndex] = set()
    while fronts.raise_:
        index = fronts.raise_.popleft()
        voxel = esdf.get_voxel(index)
        if voxel is None:
            continue
        seed, _ = _seed_of(esdf, index, voxel)
        if not voxel["fixed"]:
            voxel["distance"] = _reset_distance(voxel, config, esdf.voxel_size)
            voxel["parent"] = _ZERO
            voxel["crossing"] = 0
            invalidated.add(index)
        fronts.push_lower(index)

        for neighbor, _ in neighbors26(index):
            other = esdf.get_voxel(neighbor)
            if other is None or not other["observed"]:
                continue
            parent = _parent_of(other)
            if other["fixed"] or parent == _ZERO:
                fronts.push_lower(neighbor)
                continue
            target = _add(neighbor, parent)
            if target == index or (full and target == seed):
                fronts.push_raise(neighbor)
            else:
                # invalid neighbours still offer zero-crossing candidates
                fronts.push_lower(neighbor)
    return invalidated


def _seed_of(
    esdf: VoxelLayer, index: GridIndex, voxel: np.void
) -> Tuple[GridIndex, float]:
    parent = _parent_of(voxel)
    if voxel["fixed"] or voxel["crossing"] or parent == _ZERO:
        return index, abs(float(voxel["distance"]))
    seed = _add(index, parent)
    seed_voxel = esdf.get_voxel(seed)
    if seed_voxel is None:
        return index, abs(float(voxel["distance"]))
    return seed, abs(float(seed_voxel["distance"]))


def process_lower(
    esdf: VoxelLayer, fronts: Wavefronts, config: EsdfConfig
) -> int:
    full = config.metric == DistanceMetric.FULL_EUCLIDEAN
    limit = config.max_esdf_distance
    epsilon = config.tie_epsilon
    voxel_size = esdf.voxel_size
    updates = 0
    while fronts.lower:
        index = fronts.pop_lower()
        voxel = esdf.get_voxel(index)
        if voxel is None or not voxel["observed"]:
            continue
        distance = float(voxel["distance"])
        magnitude = abs(distance)
        sign = _sign(distance)
        is_fixed = bool(voxel["fixed"])
        valid = magnitude < limit
        seed, root_distance = (
            _seed_of(esdf, index, voxel) if full else (index, magnitude)
        )

        for neighbor, offset in neighbors26(index, voxel_size):
            other = esdf.get_voxel(neighbor)
            if other is None or not other["observed"] or other["fixed"]:
                continue
            other_distance = float(other["distance"])
            other_sign = _sign(other_distance)
            dx, dy, dz = offset.offset
            crossing = other_sign != sign and not is_fixed
            if crossing:
                # implicit surface halfway between the two voxels
                candidate = 0.5 * offset.grid_distance
                parent = (-dx, -dy, -dz)
            elif not valid:
                continue
            elif full:
                relative = (
                    seed[0] - neighbor[0],
                    seed[1] - neighbor[1],
                    seed[2] - neighbor[2],
                )
                candidate = (
                    math.sqrt(sum(c * c for c in relative)) * voxel_size
                    + root_distance
                )
                parent = relative
            else:
                candidate = magnitude + offset.grid_distance
                parent = (-dx, -dy, -dz)
            if candidate >= limit:
                continue
            if candidate < abs(other_distance) - epsilon:
                other["distance"] = other_sign * candidate
                other["parent"] = parent
                other["crossing"] = int(crossing)
                updates += 1
                fronts.push_lower(neighbor)
    return updates


def update_esdf(
    tsdf: VoxelLayer,
    esdf: VoxelLayer,
    updated: Optional[Iterable[GridIndex]],
    config: EsdfConfig,
) -> EsdfUpdateSummary:
    """Runs propagate, raise, lower. ``updated=None`` rebuilds from scratch."""
    _check_layers(tsdf, esdf)
    if updated is None:
        fronts = _batch_fronts(tsdf, esdf, config)
    else:
        fronts = propagate_from_tsdf(tsdf, esdf, updated, config)
    raised = process_raise(esdf, fronts, config)
    lowered = process_lower(esdf, fronts, config)
    if config.metric == DistanceMetric.FULL_EUCLIDEAN:
        lowered += snap_to_nearest_seed(esdf, config)
    return EsdfUpdateSummary(lowered=lowered, raised=len(raised))


IndexArray = npt.NDArray[np.int64]
MaskArray = npt.NDArray[np.bool_]


def _observed_arrays(
    esdf: VoxelLayer,
) -> Tuple[IndexArray, FloatArray, MaskArray, MaskArray]:
    indices: List[IndexArray] = []
    distances: List[FloatArray] = []
    fixed: List[MaskArray] = []
    hallucinated: List[MaskArray] = []
    for block_index, block in esdf.iter_blocks():
        mask = block["observed"] > 0
        if not mask.any():
            continue
        origin = np.asarray(esdf.block_origin(block_index), dtype=np.int64)
        voxels = block[mask]
        indices.append(np.argwhere(mask).astype(np.int64) + origin)
        distances.append(voxels["distance"].astype(np.float64))
        fixed.append(voxels["fixed"] > 0)
        hallucinated.append(voxels["hallucinated"] > 0)
    if not indices:
        empty = np.zeros(0, dtype=bool)
        return np.zeros((0, 3), dtype=np.int64), np.zeros(0), empty, empty
    return (
        np.concatenate(indices),
        np.concatenate(distances),
        np.concatenate(fixed),
        np.concatenate(hallucinated),
    )


def _crossing_roots(
    indices: IndexArray,
    signs: npt.NDArray[np.int8],
    fixed: MaskArray,
    voxel_size: float,
) -> FloatArray:
    """Half step to the nearest non-fixed neighbour of the opposite sign."""
    lower = indices.min(axis=0) - 1
    local = indices - lower
    labels = np.zeros(local.max(axis=0) + 2, dtype=np.int8)
    labels[tuple(local.T)] = np.where(fixed, 0, signs)
    roots = np.full(len(indices), np.inf)
    for _, offset in neighbors26(_ZERO, voxel_size):
        other = labels[tuple((local + np.asarray(offset.offset)).T)]
        crossing = ~fixed & (other == -signs)
        roots[crossing] = np.minimum(roots[crossing], 0.5 * offset.grid_distance)
    return roots


def _nearest_seeds(
    seeds: IndexArray,
    roots: FloatArray,
    targets: IndexArray,
    voxel_size: float,
) -> Tuple[FloatArray, IndexArray]:
    """Minimum of ``root + distance`` over the seeds, for every target."""
    points = seeds.astype(np.float64)
    tree = cKDTree(points)
    nearest, first = tree.query(targets.astype(np.float64))
    # no seed closer than the bound can beat the nearest one
    bound = (roots[first] - roots.min()) / voxel_size + nearest + 1e-9
    balls = tree.query_ball_point(targets.astype(np.float64), bound)
    best = np.empty(len(targets))
    chosen = np.empty(len(targets), dtype=np.int64)
    for row, ball in enumerate(balls):
        ids = np.sort(np.asarray(ball, dtype=np.int64))
        delta = points[ids] - targets[row]
        values = roots[ids] + np.sqrt(np.sum(delta * delta, axis=1)) * voxel_size
        k = int(np.argmin(values))
        best[row] = values[k]
        chosen[row] = ids[k]
    return best, chosen


def snap_to_nearest_seed(esdf: VoxelLayer, config: EsdfConfig) -> int:
    """Sets every non-fixed voxel to its exact distance over the seed voxels.

    Seeds are fixed voxels, zero-crossing voxels and hallucinated voxels.
    Fixed seeds reach both signs, the others only voxels of their own sign.
    The result is a function of the current TSDF and spheres alone.
    """
    indices, distances, fixed, hallucinated = _observed_arrays(esdf)
    if not len(indices):
        return 0
    voxel_size = esdf.voxel_size
    limit = config.max_esdf_distance
    signs = np.where(distances >= 0.0, 1, -1).astype(np.int8)
    crossing_roots = _crossing_roots(indices, signs, fixed, voxel_size)
    sphere_roots = np.where(signs > 0, config.clear_radius, voxel_size)
    own_roots = np.where(
        hallucinated, np.minimum(crossing_roots, sphere_roots), crossing_roots
    )
    roots = np.where(fixed, np.abs(distances), own_roots)

    changed = 0
    for sign in (1, -1):
        targets = np.flatnonzero(~fixed & (signs == sign))
        if not len(targets):
            continue
        seeds = np.flatnonzero(
            fixed | ((signs == sign) & np.isfinite(own_roots))
        )
        if len(seeds):
            best, chosen = _nearest_seeds(
                indices[seeds], roots[seeds], indices[targets], voxel_size
            )
        else:
            best = np.full(len(targets), np.inf)
            chosen = np.zeros(len(targets), dtype=np.int64)
        for row, value, seed in zip(targets, best, chosen):
            index = (
                int(indices[row, 0]),
                int(indices[row, 1]),
                int(indices[row, 2]),
            )
            voxel = esdf.get_voxel(index)
            assert voxel is not None
            own = value < limit and seeds[seed] == row
            voxel["crossing"] = int(own and value == crossing_roots[row])
            if value < limit:
                distance = sign * float(value)
                voxel["parent"] = indices[seeds[seed]] - indices[row]
            else:
                distance = sign * config.default_distance
                voxel["parent"] = _ZERO
            if abs(distance - float(voxel["distance"])) > config.tie_epsilon:
                changed += 1
            voxel["distance"] = distance
    return changed


def _batch_fronts(
    tsdf: VoxelLayer, esdf: VoxelLayer, config: EsdfConfig
) -> Wavefronts:
    esdf.blocks.clear()
    fronts = Wavefronts()
    for index in tsdf.observed_indices():
        tsdf_voxel = tsdf.get_voxel(index)
        assert tsdf_voxel is not None
        distance = float(tsdf_voxel["distance"])
        voxel = esdf.get_or_allocate(index)
        voxel["observed"] = 1
        voxel["parent"] = _ZERO
        if abs(distance) < config.fixed_band_radius:
            voxel["fixed"] = 1
            voxel["distance"] = distance
        else:
            voxel["distance"] = _sign(distance) * config.default_distance
        fronts.push_lower(index)
    return fronts


def apply_spheres(
    esdf: VoxelLayer,
    robot_position: Sequence[float],
    clear_radius: float,
    occupied_radius: float,
) -> Set[GridIndex]:
    """Hallucinate free space near the robot and occupied space around it."""
    if occupied_radius and clear_radius >= occupied_radius:
        raise ValueError("clear_radius must be below occupied_radius")
    voxel_size = esdf.voxel_size
    position = np.asarray(robot_position, dtype=np.float64)
    radius = max(clear_radius, occupied_radius)
    lower = point_to_index(position - radius, voxel_size)
    upper = point_to_index(position + radius, voxel_size)
    axes = [np.arange(lo, hi + 1) for lo, hi in zip(lower, upper)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    centers = index_to_center(grid, voxel_size)
    ranges = np.linalg.norm(centers - position, axis=1)
    modified: Set[GridIndex] = set()
    for (x, y, z), distance in zip(grid[ranges <= radius], ranges[ranges <= radius]):
        index = (int(x), int(y), int(z))
        voxel = esdf.get_voxel(index)
        inside_clear = distance <= clear_radius
        if voxel is not None and voxel["observed"]:
            if not voxel["hallucinated"]:
                continue
            if not (inside_clear and voxel["distance"] < 0):
                continue
        if voxel is None:
            voxel = esdf.get_or_allocate(index)
        voxel["observed"] = 1
        voxel["hallucinated"] = 1
        voxel["fixed"] = 0
        voxel["crossing"] = 0
        voxel["parent"] = _ZERO
        voxel["distance"] = clear_radius if inside_clear else -voxel_size
        modified.add(index)
    return modified


def lookup(
    esdf: VoxelLayer, p: Sequence[float]
) -> Optional[Tuple[float, FloatArray]]:
    return interpolate_trilinear(esdf, p)


class EsdfIntegrator:
    def __init__(
        self, tsdf: VoxelLayer, esdf: VoxelLayer, config: EsdfConfig
    ) -> None:
        _check_layers(tsdf, esdf)
        self.tsdf = tsdf
        self.esdf = esdf
        self.config = config

    def update_incremental(
        self, updated: Iterable[GridIndex]
    ) -> EsdfUpdateSummary:
        return update_esdf(self.tsdf, self.esdf, updated, self.config)

    def update_batch(self) -> EsdfUpdateSummary:
        return update_esdf(self.tsdf, self.esdf, None, self.config)

    def apply_spheres(self, robot_position: Sequence[float]) -> EsdfUpdateSummary:
        modified = apply_spheres(
            self.esdf,
            robot_position,
            self.config.clear_radius,
            self.config.occupied_radius,
        )
        fronts = Wavefronts()
        for index in sorted(modified):
            fronts.push_raise(index)
        raised = process_raise(self.esdf, fronts, self.config)
        lowered = process_lower(self.esdf, fronts, self.config)
        if self.config.metric == DistanceMetric.FULL_EUCLIDEAN:
            lowered += snap_to_nearest_seed(self.esdf, self.config)
        logger.debug(f"Hallucinated {len(modified)} voxels")
        return EsdfUpdateSummary(lowered=lowered, raised=len(raised))

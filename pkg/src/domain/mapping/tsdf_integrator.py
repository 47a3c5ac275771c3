import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
import numpy.typing as npt
from scipy.spatial.transform import Rotation

from src.common.dto import TsdfConfig, WeightMode
from src.domain.exceptions import InvalidLayerException
from src.domain.mapping.voxel_core import (
    FloatArray,
    GridIndex,
    cast_ray,
    index_to_center,
)
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer

logger = logging.getLogger()


@dataclass
class SensorScan:
    rotation: Rotation
    translation: FloatArray
    points: FloatArray
    clearing: Optional[npt.NDArray[np.bool_]] = None

    @property
    def origin(self) -> FloatArray:
        return np.asarray(self.translation, dtype=np.float64)

    def world_points(self) -> FloatArray:
        points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        return self.rotation.apply(points) + self.origin  # type: ignore


@dataclass
class TsdfDiagnostics:
    scans: int = 0
    rays: int = 0
    clearing_rays: int = 0
    skipped_non_finite: int = 0
    touched_voxels: int = 0


@dataclass
class _Accumulator:
    weighted_sum: Dict[GridIndex, float] = field(default_factory=dict)
    weight_sum: Dict[GridIndex, float] = field(default_factory=dict)

    def add(self, index: GridIndex, distance: float, weight: float) -> None:
        self.weighted_sum[index] = (
            self.weighted_sum.get(index, 0.0) + weight * distance
        )
        self.weight_sum[index] = self.weight_sum.get(index, 0.0) + weight


def _observation_weight(depth: float, config: TsdfConfig) -> float:
    if config.weight_mode == WeightMode.INVERSE_SQUARE_DEPTH:
        return 1.0 / max(depth * depth, 1e-6)
    return 1.0


def _accumulate_ray(
    accumulator: _Accumulator,
    origin: FloatArray,
    point: FloatArray,
    clearing: bool,
    config: TsdfConfig,
    voxel_size: float,
) -> None:
    ray = point - origin
    length = float(np.linalg.norm(ray))
    if length < max(config.min_ray_length, 1e-9):
        return
    direction = ray / length
    truncation = config.truncation_distance

    if clearing or length > config.max_ray_length:
        clear_length = min(length, config.max_ray_length)
        end = origin + direction * clear_length
        weight = _observation_weight(clear_length, config)
        for index in cast_ray(origin, end, voxel_size):
            accumulator.add(index, truncation, weight)
        return

    end = origin + direction * (length + truncation)
    weight = _observation_weight(length, config)
    for index in cast_ray(origin, end, voxel_size):
        center = index_to_center(index, voxel_size)
        projective = length - float(np.dot(center - origin, direction))
        projective = min(max(projective, -truncation), truncation)
        accumulator.add(index, projective, weight)


def integrate_scan(
    layer: VoxelLayer,
    scan: SensorScan,
    config: TsdfConfig,
    diagnostics: Optional[TsdfDiagnostics] = None,
) -> Set[GridIndex]:
    """Fuse one scan; observations are grouped per voxel, then merged."""
    if layer.kind != VoxelKind.TSDF:
        raise InvalidLayerException("TSDF integration needs a TSDF layer.")
    if diagnostics is None:
        diagnostics = TsdfDiagnostics()

    origin = scan.origin
    world_points = scan.world_points()
    clearing_mask = (
        np.zeros(len(world_points), dtype=bool)
        if scan.clearing is None
        else np.asarray(scan.clearing, dtype=bool)
    )
    accumulator = _Accumulator()
    for point, clearing in zip(world_points, clearing_mask):
        if not np.all(np.isfinite(point)):
            diagnostics.skipped_non_finite += 1
            continue
        diagnostics.rays += 1
        if clearing or np.linalg.norm(point - origin) > config.max_ray_length:
            diagnostics.clearing_rays += 1
        _accumulate_ray(
            accumulator,
            origin,
            point,
            bool(clearing),
            config,
            layer.voxel_size,
        )

    for index, weight in accumulator.weight_sum.items():
        observed = accumulator.weighted_sum[index] / weight
        voxel = layer.get_or_allocate(index)
        old_weight = float(voxel["weight"])
        old_distance = float(voxel["distance"])
        merged = (old_weight * old_distance + weight * observed) / (
            old_weight + weight
        )
        truncation = config.truncation_distance
        voxel["distance"] = min(max(merged, -truncation), truncation)
        voxel["weight"] = min(old_weight + weight, config.max_weight)

    if diagnostics.skipped_non_finite:
        logger.warning(
            f"Skipped {diagnostics.skipped_non_finite} non-finite points"
        )
    diagnostics.scans += 1
    diagnostics.touched_voxels += len(accumulator.weight_sum)
    return set(accumulator.weight_sum)


class TsdfIntegrator:
    def __init__(self, layer: VoxelLayer, config: TsdfConfig) -> None:
        config.check_against(layer.config)
        self.layer = layer
        self.config = config
        self.diagnostics = TsdfDiagnostics()

    def integrate(self, scan: SensorScan) -> Set[GridIndex]:
        return integrate_scan(self.layer, scan, self.config, self.diagnostics)

    def integrate_many(self, scans: List[SensorScan]) -> Set[GridIndex]:
        updated: Set[GridIndex] = set()
        for scan in scans:
            updated |= self.integrate(scan)
        return updated


def scan_from_pose(
    translation: Tuple[float, float, float],
    quaternion_xyzw: Tuple[float, float, float, float],
    points: FloatArray,
) -> SensorScan:
    return SensorScan(
        rotation=Rotation.from_quat(quaternion_xyzw),
        translation=np.asarray(translation, dtype=np.float64),
        points=np.asarray(points, dtype=np.float64).reshape(-1, 3),
    )

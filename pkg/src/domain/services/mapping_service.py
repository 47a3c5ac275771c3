import logging
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Set

from src.common.dto import EsdfConfig, LayerConfig, TsdfConfig
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.mapping.esdf_integrator import EsdfIntegrator, EsdfUpdateSummary
from src.domain.mapping.tsdf_integrator import (
    SensorScan,
    TsdfDiagnostics,
    TsdfIntegrator,
)
from src.domain.mapping.voxel_core import GridIndex
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer

logger = logging.getLogger()


@dataclass
class MappingTimings:
    tsdf_s: float = 0.0
    esdf_s: float = 0.0


class MappingService:
    """TSDF and ESDF layers of one map, updated scan by scan."""

    def __init__(
        self,
        layer_config: LayerConfig,
        tsdf_config: TsdfConfig,
        esdf_config: EsdfConfig,
        tsdf: Optional[VoxelLayer] = None,
    ) -> None:
        esdf_config.check_against(layer_config, tsdf_config)
        self.tsdf = tsdf or VoxelLayer(layer_config, VoxelKind.TSDF)
        self.esdf = VoxelLayer(layer_config, VoxelKind.ESDF)
        self.__tsdf_integrator = TsdfIntegrator(self.tsdf, tsdf_config)
        self.__esdf_integrator = EsdfIntegrator(self.tsdf, self.esdf, esdf_config)
        self.timings = MappingTimings()

    @property
    def diagnostics(self) -> TsdfDiagnostics:
        return self.__tsdf_integrator.diagnostics

    def integrate(self, scan: SensorScan) -> Set[GridIndex]:
        started = time.perf_counter()
        updated = self.__tsdf_integrator.integrate(scan)
        self.timings.tsdf_s += time.perf_counter() - started
        return updated

    def update_esdf(
        self, updated: Optional[Iterable[GridIndex]] = None
    ) -> EsdfUpdateSummary:
        """Incremental update from ``updated``, or a full rebuild when None."""
        started = time.perf_counter()
        if updated is None:
            summary = self.__esdf_integrator.update_batch()
        else:
            summary = self.__esdf_integrator.update_incremental(updated)
        self.timings.esdf_s += time.perf_counter() - started
        return summary

    def apply_spheres(self, robot_position: Sequence[float]) -> EsdfUpdateSummary:
        started = time.perf_counter()
        summary = self.__esdf_integrator.apply_spheres(robot_position)
        self.timings.esdf_s += time.perf_counter() - started
        return summary

    def integrate_all(
        self, scans: Iterable[SensorScan], incremental: bool = True
    ) -> int:
        count = 0
        for scan in scans:
            updated = self.integrate(scan)
            if incremental:
                self.update_esdf(updated)
            count += 1
        if not incremental:
            self.update_esdf()
        logger.info(
            f"Integrated {count} scans into {len(self.tsdf.blocks)} TSDF blocks "
            f"(tsdf {self.timings.tsdf_s:.3f}s, esdf {self.timings.esdf_s:.3f}s)"
        )
        return count

    def snapshot(self) -> DistanceSnapshot:
        return DistanceSnapshot.from_layer(self.esdf)

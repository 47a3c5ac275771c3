import logging
import struct
from typing import BinaryIO, List, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from src.adapters.exceptions import ScanFormatException
from src.domain.mapping.tsdf_integrator import SensorScan
from src.ports.scan_source_port import ScanSourcePort

logger = logging.getLogger()

_POSE = struct.Struct("<7d")
_COUNT = struct.Struct("<Q")
_POINT = np.dtype("<f4")
_RANGE_TOLERANCE = 1e-3


class ScanFileAdapter(ScanSourcePort):
    """Records of translation, xyzw quaternion, point count and f32 points.

    The record has no clearing flag; with ``clearing_range`` set, points at
    that range or beyond are read back as clearing rays.
    """

    def __init__(self, clearing_range: Optional[float] = None) -> None:
        self.clearing_range = clearing_range

    def read(self, path: str) -> List[SensorScan]:
        scans: List[SensorScan] = []
        with open(path, "rb") as handle:
            while True:
                pose = handle.read(_POSE.size)
                if not pose:
                    break
                scans.append(self._read_record(handle, pose))
        logger.info(f"Read {len(scans)} scans from {path}")
        return scans

    def _read_record(self, handle: BinaryIO, pose: bytes) -> SensorScan:
        if len(pose) != _POSE.size:
            raise ScanFormatException("Truncated scan pose.")
        values = _POSE.unpack(pose)
        header = handle.read(_COUNT.size)
        if len(header) != _COUNT.size:
            raise ScanFormatException("Truncated point count.")
        (count,) = _COUNT.unpack(header)
        size = count * 3 * _POINT.itemsize
        payload = handle.read(size)
        if len(payload) != size:
            raise ScanFormatException("Truncated point payload.")
        quaternion = np.asarray(values[3:])
        if not np.isfinite(quaternion).all() or np.linalg.norm(quaternion) == 0:
            raise ScanFormatException("Invalid scan orientation.")
        points = np.frombuffer(payload, dtype=_POINT).reshape(-1, 3).astype(np.float64)
        clearing = None
        if self.clearing_range is not None:
            ranges = np.linalg.norm(points, axis=1)
            clearing = ranges >= self.clearing_range - _RANGE_TOLERANCE
        return SensorScan(
            rotation=Rotation.from_quat(quaternion),
            translation=np.asarray(values[:3], dtype=np.float64),
            points=points,
            clearing=clearing,
        )

    def write(self, path: str, scans: List[SensorScan]) -> None:
        with open(path, "wb") as handle:
            for scan in scans:
                points = np.asarray(scan.points, dtype=np.float64).reshape(-1, 3)
                handle.write(
                    _POSE.pack(*scan.origin.tolist(), *scan.rotation.as_quat().tolist())
                )
                handle.write(_COUNT.pack(len(points)))
                handle.write(points.astype(_POINT).tobytes())
        logger.info(f"Wrote {len(scans)} scans to {path}")

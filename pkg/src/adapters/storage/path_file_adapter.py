import csv
import logging
import sys
from typing import IO, Optional

import numpy as np

from src.adapters.exceptions import PathFormatException
from src.adapters.storage.table_file_adapter import manifest_comment
from src.common.dto import RunManifest
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.polynomial import TrajectorySamples

logger = logging.getLogger()

TRAJECTORY_COLUMNS = [
    "time", "x", "y", "z", "vx", "vy", "vz", "ax", "ay", "az", "yaw"
]


def _open_output(path: str) -> IO[str]:
    if path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


class PathFileAdapter:
    """Waypoint lists as ``x y z`` lines and sampled trajectories as CSV.

    Lines starting with ``#`` or ``{`` are skipped on read, so a plan
    printed with its JSON record can be read back directly.
    """

    def read(self, path: str) -> WaypointPath:
        points = []
        with open(path, "r", encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                text = line.strip()
                if not text or text.startswith(("#", "{")):
                    continue
                fields = text.split()
                if len(fields) != 3:
                    raise PathFormatException(
                        f"{path}:{number}: expected 'x y z', got {text!r}"
                    )
                try:
                    points.append([float(value) for value in fields])
                except ValueError:
                    raise PathFormatException(
                        f"{path}:{number}: non-numeric waypoint {text!r}"
                    )
        if not points:
            raise PathFormatException(f"{path}: no waypoints")
        if not np.isfinite(points).all():
            raise PathFormatException(f"{path}: non-finite waypoint")
        return WaypointPath.from_points(points)

    def write(
        self,
        path: str,
        waypoints: WaypointPath,
        manifest: Optional[RunManifest] = None,
    ) -> None:
        stream = _open_output(path)
        try:
            if manifest is not None:
                stream.write(manifest_comment(manifest))
            for x, y, z in waypoints.waypoints:
                stream.write(f"{x!r} {y!r} {z!r}\n")
        finally:
            if stream is not sys.stdout:
                stream.close()

    def write_trajectory(
        self,
        path: str,
        samples: TrajectorySamples,
        manifest: Optional[RunManifest] = None,
    ) -> None:
        stream = _open_output(path)
        try:
            if manifest is not None:
                stream.write(manifest_comment(manifest))
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(TRAJECTORY_COLUMNS)
            table = np.column_stack(
                [
                    samples.times,
                    samples.positions,
                    samples.velocities,
                    samples.accelerations,
                    samples.yaws,
                ]
            )
            for row in table:
                writer.writerow([float(value) for value in row])
        finally:
            if stream is not sys.stdout:
                stream.close()
        logger.info(f"Wrote {len(samples)} trajectory samples to {path}")

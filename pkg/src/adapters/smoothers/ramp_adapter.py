import logging

from src.common.dto import LocoConfig, SmoothingConfig
from src.domain.exceptions import SmoothingFailedException
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.audit import DistanceField, first_collision
from src.domain.trajectory.polynomial import Trajectory
from src.domain.trajectory.velocity_ramp import velocity_ramp
from src.ports.path_smoother_port import PathSmootherPort

logger = logging.getLogger()


class RampSmootherAdapter(PathSmootherPort):
    name = "ramp"

    def __init__(
        self, field: DistanceField, smoothing: SmoothingConfig, loco: LocoConfig
    ) -> None:
        self.field = field
        self.smoothing = smoothing

    def smooth(self, path: WaypointPath) -> Trajectory:
        config = self.smoothing
        trajectory = velocity_ramp(path, config.v_max, config.a_max)
        hit = first_collision(
            trajectory, self.field, config.robot_radius, config.check_dt
        )
        if hit is not None:
            raise SmoothingFailedException(f"ramp in collision at t={hit.time:.3f}s")
        return trajectory

from src.common.dto import LocoConfig, SmoothingConfig
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.audit import DistanceField
from src.domain.trajectory.polynomial import Trajectory
from src.domain.trajectory.velocity_ramp import velocity_ramp
from src.ports.path_smoother_port import PathSmootherPort


class NoSmootherAdapter(PathSmootherPort):
    """Timing-only pass-through: a velocity ramp with no collision audit."""

    name = "none"

    def __init__(
        self, field: DistanceField, smoothing: SmoothingConfig, loco: LocoConfig
    ) -> None:
        self.smoothing = smoothing

    def smooth(self, path: WaypointPath) -> Trajectory:
        return velocity_ramp(path, self.smoothing.v_max, self.smoothing.a_max)

from src.common.dto import LocoConfig, SmoothingConfig
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.audit import DistanceField
from src.domain.trajectory.loco import LocoSmoother
from src.domain.trajectory.polynomial import Trajectory
from src.ports.path_smoother_port import PathSmootherPort


class LocoSmootherAdapter(PathSmootherPort):
    """Soft-cost optimisation; radius and limits follow the smoothing config."""

    name = "loco"

    def __init__(
        self, field: DistanceField, smoothing: SmoothingConfig, loco: LocoConfig
    ) -> None:
        config = loco.model_copy(
            update={
                "robot_radius": smoothing.robot_radius,
                "v_max": smoothing.v_max,
                "a_max": smoothing.a_max,
                "derivative_order": smoothing.derivative_order,
            }
        )
        self.smoother = LocoSmoother(field, config)

    def smooth(self, path: WaypointPath) -> Trajectory:
        return self.smoother.smooth(path)

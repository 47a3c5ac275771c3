from src.common.dto import LocoConfig, SmoothingConfig
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.audit import DistanceField
from src.domain.trajectory.polynomial import Trajectory
from src.domain.trajectory.polynomial_smoother import smooth_polynomial_split
from src.ports.path_smoother_port import PathSmootherPort


class PolynomialSmootherAdapter(PathSmootherPort):
    name = "poly"

    def __init__(
        self, field: DistanceField, smoothing: SmoothingConfig, loco: LocoConfig
    ) -> None:
        self.field = field
        self.smoothing = smoothing

    def smooth(self, path: WaypointPath) -> Trajectory:
        return smooth_polynomial_split(path, self.field, self.smoothing)

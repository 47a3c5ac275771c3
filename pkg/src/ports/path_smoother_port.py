from abc import ABC, abstractmethod

from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.polynomial import Trajectory


class PathSmootherPort(ABC):
    name: str = ""

    @abstractmethod
    def smooth(self, path: WaypointPath) -> Trajectory:
        """Collision-checked trajectory; raises SmoothingFailedException."""
        raise NotImplementedError

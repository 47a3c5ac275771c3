from abc import ABC, abstractmethod
from typing import List

from src.domain.mapping.tsdf_integrator import SensorScan


class ScanSourcePort(ABC):
    @abstractmethod
    def read(self, path: str) -> List[SensorScan]:
        raise NotImplementedError

    @abstractmethod
    def write(self, path: str, scans: List[SensorScan]) -> None:
        raise NotImplementedError

from abc import ABC, abstractmethod
from typing import Optional

from src.common.dto import RunManifest
from src.domain.topology.sparse_graph import SparseGraph


class GraphStorePort(ABC):
    @abstractmethod
    def read(self, path: str) -> SparseGraph:
        raise NotImplementedError

    @abstractmethod
    def write(
        self,
        path: str,
        graph: SparseGraph,
        manifest: Optional[RunManifest] = None,
    ) -> None:
        raise NotImplementedError

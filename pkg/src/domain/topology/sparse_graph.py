import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from src.domain.mapping.voxel_core import FloatArray

logger = logging.getLogger()


@dataclass(frozen=True)
class GraphVertex:
    id: int
    position: Tuple[float, float, float]
    clearance: float
    subgraph_id: int


def _triple(values: FloatArray) -> Tuple[float, float, float]:
    return (float(values[0]), float(values[1]), float(values[2]))


def point_segment_distance(
    p: Sequence[float], a: Sequence[float], b: Sequence[float]
) -> float:
    point, start, end = (np.asarray(v, dtype=np.float64) for v in (p, a, b))
    direction = end - start
    length_sq = float(direction @ direction)
    if length_sq == 0.0:
        return float(np.linalg.norm(point - start))
    t = min(max(float((point - start) @ direction) / length_sq, 0.0), 1.0)
    return float(np.linalg.norm(point - (start + t * direction)))


class SparseGraph:
    """Vertices and straight edges abstracted from the skeleton diagram.

    Edges are weighted by Euclidean length and may cross untraversable
    space; planners must validate them.
    """

    def __init__(self, voxel_size: float) -> None:
        self.voxel_size = voxel_size
        self.graph = nx.Graph()
        self._next_vertex = 0
        self._next_edge = 0
        self._tree: Optional[Tuple[cKDTree, List[int]]] = None

    def add_vertex(
        self,
        position: Sequence[float],
        clearance: float,
        vertex_id: Optional[int] = None,
    ) -> int:
        if vertex_id is None:
            vertex_id = self._next_vertex
        self._next_vertex = max(self._next_vertex, vertex_id + 1)
        self.graph.add_node(
            vertex_id,
            position=np.asarray(position, dtype=np.float64),
            clearance=float(clearance),
            subgraph_id=0,
        )
        self._tree = None
        return vertex_id

    def add_edge(self, a: int, b: int, edge_id: Optional[int] = None) -> bool:
        if a == b or self.graph.has_edge(a, b):
            return False
        if edge_id is None:
            edge_id = self._next_edge
        self._next_edge = max(self._next_edge, edge_id + 1)
        length = float(np.linalg.norm(self.position(a) - self.position(b)))
        self.graph.add_edge(a, b, id=edge_id, length=length)
        return True

    def remove_vertex(self, vertex_id: int) -> None:
        self.graph.remove_node(vertex_id)
        self._tree = None

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.graph.has_edge(a, b))

    def position(self, vertex_id: int) -> FloatArray:
        return self.graph.nodes[vertex_id]["position"]  # type: ignore[no-any-return]

    def clearance(self, vertex_id: int) -> float:
        return float(self.graph.nodes[vertex_id]["clearance"])

    def degree(self, vertex_id: int) -> int:
        return int(self.graph.degree[vertex_id])

    def neighbors(self, vertex_id: int) -> List[int]:
        return sorted(self.graph.neighbors(vertex_id))

    def vertex_ids(self) -> List[int]:
        return sorted(self.graph.nodes)

    def vertices(self) -> List[GraphVertex]:
        return [
            GraphVertex(
                vertex_id,
                _triple(self.position(vertex_id)),
                self.clearance(vertex_id),
                int(self.graph.nodes[vertex_id]["subgraph_id"]),
            )
            for vertex_id in self.vertex_ids()
        ]

    def edges(self) -> List[Tuple[int, int, int]]:
        """(edge id, lower vertex id, higher vertex id) sorted by edge id."""
        records = [
            (int(data["id"]), min(a, b), max(a, b))
            for a, b, data in self.graph.edges(data=True)
        ]
        return sorted(records)

    @property
    def vertex_count(self) -> int:
        return int(self.graph.number_of_nodes())

    @property
    def edge_count(self) -> int:
        return int(self.graph.number_of_edges())

    def label_subgraphs(self) -> List[List[int]]:
        """Assign subgraph ids by connected component, ordered by lowest id."""
        components = sorted(
            (sorted(component) for component in nx.connected_components(self.graph)),
            key=lambda members: members[0],
        )
        for label, members in enumerate(components):
            for vertex_id in members:
                self.graph.nodes[vertex_id]["subgraph_id"] = label
        return components

    def positions(self, vertex_ids: Optional[Sequence[int]] = None) -> FloatArray:
        ids = self.vertex_ids() if vertex_ids is None else list(vertex_ids)
        if not ids:
            return np.zeros((0, 3))
        return np.stack([self.position(vertex_id) for vertex_id in ids])

    def nearest(self, p: Sequence[float], k: int) -> List[int]:
        if self.vertex_count == 0:
            return []
        if self._tree is None:
            ids = self.vertex_ids()
            self._tree = (cKDTree(self.positions(ids)), ids)
        tree, ids = self._tree
        k = min(k, len(ids))
        _, found = tree.query(np.asarray(p, dtype=np.float64), k=k)
        found = np.atleast_1d(found)
        return [ids[int(i)] for i in found]

    def copy(self) -> "SparseGraph":
        clone = SparseGraph(self.voxel_size)
        clone.graph = self.graph.copy()
        for vertex_id in clone.graph.nodes:
            node = clone.graph.nodes[vertex_id]
            node["position"] = np.array(node["position"], copy=True)
        clone._next_vertex = self._next_vertex
        clone._next_edge = self._next_edge
        return clone

    def summary(self) -> Dict[str, int]:
        return {
            "vertices": self.vertex_count,
            "edges": self.edge_count,
            "subgraphs": nx.number_connected_components(self.graph),
        }

import logging
from typing import List, Optional, Tuple

from pydantic import ValidationError

from src.adapters.exceptions import GraphFormatException
from src.common.dto import RunManifest
from src.domain.topology.sparse_graph import SparseGraph
from src.ports.graph_store_port import GraphStorePort

logger = logging.getLogger()

_VOXEL_SIZE = "# voxel_size "
_MANIFEST = "# manifest "


class GraphFileAdapter(GraphStorePort):
    """Plain-text graphs: ``V id x y z clearance`` and ``E id v1 v2`` records.

    Lines starting with ``#`` are comments; two of them carry the voxel
    size and the run manifest.
    """

    def __init__(self, default_voxel_size: float = 0.1) -> None:
        self.default_voxel_size = default_voxel_size
        self.manifest: Optional[RunManifest] = None

    def write(
        self,
        path: str,
        graph: SparseGraph,
        manifest: Optional[RunManifest] = None,
    ) -> None:
        lines = [f"{_VOXEL_SIZE}{graph.voxel_size!r}"]
        if manifest is not None:
            lines.append(f"{_MANIFEST}{manifest.model_dump_json()}")
        for vertex in graph.vertices():
            x, y, z = vertex.position
            lines.append(f"V {vertex.id} {x!r} {y!r} {z!r} {vertex.clearance!r}")
        for edge_id, a, b in graph.edges():
            lines.append(f"E {edge_id} {a} {b}")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
        logger.info(f"Wrote graph {graph.summary()} to {path}")

    def read(self, path: str) -> SparseGraph:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        voxel_size = self.default_voxel_size
        vertices: List[Tuple[int, List[float]]] = []
        edges: List[Tuple[int, int, int]] = []
        self.manifest = None
        for number, line in enumerate(lines, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                if text.startswith(_VOXEL_SIZE):
                    voxel_size = float(text[len(_VOXEL_SIZE) :])
                elif text.startswith(_MANIFEST):
                    self.manifest = RunManifest.model_validate_json(
                        text[len(_MANIFEST) :]
                    )
                elif text.startswith("#"):
                    continue
                elif text.startswith("V "):
                    fields = text.split()
                    if len(fields) != 6:
                        raise ValueError("vertex records have 6 fields")
                    vertices.append((int(fields[1]), [float(f) for f in fields[2:]]))
                elif text.startswith("E "):
                    fields = text.split()
                    if len(fields) != 4:
                        raise ValueError("edge records have 4 fields")
                    edges.append((int(fields[1]), int(fields[2]), int(fields[3])))
                else:
                    raise ValueError(f"unknown record {text.split()[0]!r}")
            except (ValueError, ValidationError) as error:
                logger.error(f"Bad graph record at {path}:{number}: {error}")
                raise GraphFormatException(f"line {number}: {error}")

        graph = SparseGraph(voxel_size)
        for vertex_id, (x, y, z, clearance) in vertices:
            graph.add_vertex((x, y, z), clearance, vertex_id)
        for edge_id, a, b in edges:
            if a not in graph.graph or b not in graph.graph:
                raise GraphFormatException(
                    f"edge {edge_id} references a missing vertex"
                )
            graph.add_edge(a, b, edge_id)
        graph.label_subgraphs()
        return graph

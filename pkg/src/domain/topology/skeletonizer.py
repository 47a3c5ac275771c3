"""GVD extraction, thinning and sparse graph construction over an ESDF.

Stages: ``compute_gvd`` -> ``thin_diagram`` -> ``build_sparse_graph`` ->
``simplify_graph`` -> ``reconnect_subgraphs``. ``SkeletonGenerator`` runs
them in order over a frozen ESDF snapshot.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
import numpy.typing as npt
from scipy import ndimage
from skimage.morphology import skeletonize

from src.common.dto import LayerConfig, SkeletonConfig
from src.domain.exceptions import (
    InvalidLayerException,
    PlanningFailedException,
)
from src.domain.mapping.distance_snapshot import BoolArray, DistanceSnapshot
from src.domain.mapping.voxel_core import (
    NEIGHBOR_OFFSETS,
    FloatArray,
    GridIndex,
    index_to_center,
    point_to_index,
)
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.grid_search import grid_astar
from src.domain.planning.paths import WaypointPath
from src.domain.planning.shortening import shorten_path
from src.domain.topology.sparse_graph import SparseGraph, point_segment_distance

logger = logging.getLogger()

_CUBE = np.ones((3, 3, 3), dtype=bool)


@dataclass
class SkeletonGrid:
    """Dense view of a skeleton layer over its allocated extent."""

    origin: npt.NDArray[np.int64]
    voxel_size: float
    distance: FloatArray
    basis_count: npt.NDArray[np.int64]
    is_face: BoolArray
    is_edge: BoolArray
    is_vertex: BoolArray

    @classmethod
    def empty_like(
        cls, shape: Tuple[int, ...], origin: npt.NDArray[np.int64], voxel_size: float
    ) -> "SkeletonGrid":
        return cls(
            origin=origin,
            voxel_size=voxel_size,
            distance=np.zeros(shape),
            basis_count=np.zeros(shape, dtype=np.int64),
            is_face=np.zeros(shape, dtype=bool),
            is_edge=np.zeros(shape, dtype=bool),
            is_vertex=np.zeros(shape, dtype=bool),
        )

    @classmethod
    def from_layer(cls, layer: VoxelLayer) -> "SkeletonGrid":
        if layer.kind != VoxelKind.SKELETON:
            raise InvalidLayerException("Expected a skeleton layer.")
        bounds = layer.index_bounds()
        if bounds is None:
            origin = np.zeros(3, dtype=np.int64)
            return cls.empty_like((0, 0, 0), origin, layer.voxel_size)
        lower, upper = bounds
        shape = tuple(u - lo for u, lo in zip(upper, lower))
        offset = np.asarray(lower, dtype=np.int64)
        grid = cls.empty_like(shape, offset, layer.voxel_size)
        vps = layer.voxels_per_side
        for block_index, block in layer.iter_blocks():
            origin = layer.block_origin(block_index)
            sl = tuple(slice(o - lo, o - lo + vps) for o, lo in zip(origin, lower))
            grid.distance[sl] = block["distance"]
            grid.basis_count[sl] = block["num_basis_neighbors"]
            grid.is_face[sl] = block["is_face"] > 0
            grid.is_edge[sl] = block["is_edge"] > 0
            grid.is_vertex[sl] = block["is_vertex"] > 0
        return grid

    def to_layer(self, config: LayerConfig) -> VoxelLayer:
        layer = VoxelLayer(config, VoxelKind.SKELETON)
        for local in np.argwhere(self.is_face):
            lx, ly, lz = (int(c) for c in local)
            index = self.global_index((lx, ly, lz))
            voxel = layer.get_or_allocate(index)
            voxel["distance"] = self.distance[lx, ly, lz]
            voxel["num_basis_neighbors"] = min(int(self.basis_count[lx, ly, lz]), 26)
            voxel["is_face"] = 1
            voxel["is_edge"] = int(self.is_edge[lx, ly, lz])
            voxel["is_vertex"] = int(self.is_vertex[lx, ly, lz])
        return layer

    def global_index(self, local: Tuple[int, int, int]) -> GridIndex:
        return (
            local[0] + int(self.origin[0]),
            local[1] + int(self.origin[1]),
            local[2] + int(self.origin[2]),
        )

    def local_index(self, index: GridIndex) -> Optional[Tuple[int, int, int]]:
        local = tuple(int(i - o) for i, o in zip(index, self.origin))
        if any(c < 0 or c >= n for c, n in zip(local, self.is_edge.shape)):
            return None
        return (local[0], local[1], local[2])

    def center(self, local: Tuple[int, int, int]) -> FloatArray:
        return index_to_center(self.global_index(local), self.voxel_size)


def _layer_config(
    voxel_size: float, layer_config: Optional[LayerConfig]
) -> LayerConfig:
    return layer_config or LayerConfig(voxel_size=voxel_size)


def compute_gvd(
    esdf: DistanceSnapshot,
    config: SkeletonConfig,
    layer_config: Optional[LayerConfig] = None,
) -> VoxelLayer:
    """Flag basis-point voxels and classify them as face, edge or vertex.

    A neighbor counts as a basis point when its parent direction differs
    from the voxel's own by at least the metric's separation angle. The
    face, edge and vertex thresholds apply to that count, so a junction
    voxel is classified against the obstacle its own parent names.
    """
    if esdf.parents is None:
        raise InvalidLayerException("GVD extraction needs ESDF parents.")
    shape = esdf.shape
    grid = SkeletonGrid.empty_like(shape, esdf.origin.copy(), esdf.voxel_size)
    if 0 in shape:
        return grid.to_layer(_layer_config(esdf.voxel_size, layer_config))

    parents = esdf.parents.astype(np.float64)
    norms = np.linalg.norm(parents, axis=-1)
    has_parent = esdf.observed & (norms > 0)
    unit = np.zeros_like(parents)
    unit[has_parent] = parents[has_parent] / norms[has_parent][:, None]
    with np.errstate(invalid="ignore"):
        eligible = has_parent & (esdf.distances > config.min_gvd_distance)

    threshold = math.cos(math.radians(config.separation_angle_deg)) + 1e-9
    padded_unit = np.pad(unit, ((1, 1), (1, 1), (1, 1), (0, 0)))
    padded_has = np.pad(has_parent, 1)
    nx, ny, nz = shape
    count = np.zeros(shape, dtype=np.int64)
    for dx, dy, dz in NEIGHBOR_OFFSETS:
        sl = (
            slice(1 + dx, 1 + dx + nx),
            slice(1 + dy, 1 + dy + ny),
            slice(1 + dz, 1 + dz + nz),
        )
        dots = np.sum(unit * padded_unit[sl], axis=-1)
        count += padded_has[sl] & (dots <= threshold)
    count[~eligible] = 0

    grid.basis_count = count
    grid.distance = np.where(esdf.observed, esdf.distances, 0.0)
    grid.is_face = count >= config.face_threshold
    grid.is_edge = count >= config.edge_threshold
    grid.is_vertex = count >= config.vertex_threshold
    logger.info(
        f"GVD: {int(grid.is_face.sum())} face, {int(grid.is_edge.sum())} edge, "
        f"{int(grid.is_vertex.sum())} vertex voxels"
    )
    return grid.to_layer(_layer_config(esdf.voxel_size, layer_config))


def thin_diagram(skeleton: VoxelLayer) -> VoxelLayer:
    """One-voxel-thick skeleton of the edge voxels; vertex voxels stay pinned."""
    grid = SkeletonGrid.from_layer(skeleton)
    if grid.is_edge.size == 0 or not grid.is_edge.any():
        return SkeletonGrid.empty_like(
            grid.is_edge.shape, grid.origin, grid.voxel_size
        ).to_layer(skeleton.config)
    padded = np.pad(grid.is_edge, 1)
    thinned = skeletonize(padded, method="lee")[1:-1, 1:-1, 1:-1] > 0
    thinned |= grid.is_vertex

    grid.is_face = thinned.copy()
    grid.is_edge = thinned.copy()
    grid.is_vertex = grid.is_vertex & thinned
    logger.debug(f"Thinned {int(padded.sum())} edge voxels to {int(thinned.sum())}")
    return grid.to_layer(skeleton.config)


def _expanded_slice(
    sl: Tuple[slice, ...], shape: Tuple[int, ...]
) -> Tuple[slice, ...]:
    return tuple(
        slice(max(s.start - 1, 0), min(s.stop + 1, n)) for s, n in zip(sl, shape)
    )


def _run_terminals(
    run: BoolArray, vertex_labels: npt.NDArray[np.int32]
) -> Set[int]:
    touched = ndimage.binary_dilation(run, structure=_CUBE)
    labels = np.unique(vertex_labels[touched])
    return {int(label) for label in labels if label > 0}


def _promote_junction(
    run: BoolArray, vertex_mask: BoolArray, offset: Tuple[int, ...]
) -> Tuple[int, int, int]:
    support = (run | vertex_mask).astype(np.int64)
    counts = ndimage.convolve(support, _CUBE.astype(np.int64), mode="constant")
    counts -= support
    counts[~run] = -1
    best = np.argwhere(counts == counts.max())[0]
    return (
        int(best[0]) + offset[0],
        int(best[1]) + offset[1],
        int(best[2]) + offset[2],
    )


def build_sparse_graph(skeleton: VoxelLayer) -> SparseGraph:
    grid = SkeletonGrid.from_layer(skeleton)
    graph = SparseGraph(grid.voxel_size)
    if grid.is_edge.size == 0:
        return graph
    structure = grid.is_edge | grid.is_vertex
    vertex_mask = grid.is_vertex.copy()

    while True:
        vertex_labels, _ = ndimage.label(vertex_mask, structure=_CUBE)
        run_labels, run_count = ndimage.label(structure & ~vertex_mask, structure=_CUBE)
        runs: List[Tuple[int, Set[int]]] = []
        promoted = False
        for label, sl in enumerate(ndimage.find_objects(run_labels), start=1):
            if sl is None:
                continue
            wide = _expanded_slice(sl, structure.shape)
            run = run_labels[wide] == label
            terminals = _run_terminals(run, vertex_labels[wide])
            if len(terminals) > 2:
                offset = tuple(s.start for s in wide)
                junction = _promote_junction(run, vertex_mask[wide], offset)
                lo = [max(c - 1, 0) for c in junction]
                hi = [c + 2 for c in junction]
                cube = (slice(lo[0], hi[0]), slice(lo[1], hi[1]), slice(lo[2], hi[2]))
                vertex_mask[cube] |= run_labels[cube] == label
                vertex_mask[junction] = True
                logger.warning(
                    f"Promoted junction voxel {grid.global_index(junction)} "
                    f"on an edge run with {len(terminals)} terminals"
                )
                promoted = True
                break
            runs.append((label, terminals))
        if not promoted:
            break

    cluster_vertex: Dict[int, int] = {}
    for label, sl in enumerate(ndimage.find_objects(vertex_labels), start=1):
        if sl is None:
            continue
        offset = np.array([s.start for s in sl])
        members = np.argwhere(vertex_labels[sl] == label) + offset
        mean = members.mean(axis=0)
        closest = members[int(np.argmin(np.linalg.norm(members - mean, axis=1)))]
        local = (int(closest[0]), int(closest[1]), int(closest[2]))
        clearance = float(grid.distance[tuple(members.T)].min())
        cluster_vertex[label] = graph.add_vertex(grid.center(local), clearance)

    for label, terminals in runs:
        if len(terminals) != 2:
            logger.warning(
                f"Dropped edge run {label} touching {len(terminals)} vertices"
            )
            continue
        a, b = sorted(terminals)
        graph.add_edge(cluster_vertex[a], cluster_vertex[b])
    graph.label_subgraphs()
    return graph


def simplify_graph(graph: SparseGraph, max_displacement: float) -> SparseGraph:
    """Remove degree-2 vertices whose bypass edge stays within max_displacement."""
    simplified = graph.copy()
    changed = True
    while changed:
        changed = False
        for vertex_id in simplified.vertex_ids():
            if simplified.degree(vertex_id) != 2:
                continue
            a, b = simplified.neighbors(vertex_id)
            if simplified.has_edge(a, b):
                continue
            displacement = point_segment_distance(
                simplified.position(vertex_id),
                simplified.position(a),
                simplified.position(b),
            )
            if displacement <= max_displacement:
                simplified.remove_vertex(vertex_id)
                simplified.add_edge(a, b)
                changed = True
    simplified.label_subgraphs()
    return simplified


def _max_deviation(points: FloatArray) -> float:
    return max(
        (point_segment_distance(p, points[0], points[-1]) for p in points),
        default=0.0,
    )


def _closest_pairs(
    graph: SparseGraph, first: List[int], second: List[int], limit: int
) -> List[Tuple[int, int]]:
    a = graph.positions(first)
    b = graph.positions(second)
    distances = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    order = np.argsort(distances, axis=None, kind="stable")[:limit]
    return [
        (first[int(i) // len(second)], second[int(i) % len(second)]) for i in order
    ]


class _Connector:
    def __init__(
        self,
        graph: SparseGraph,
        skeleton: SkeletonGrid,
        checker: CollisionChecker,
        config: SkeletonConfig,
    ) -> None:
        self.graph = graph
        self.skeleton = skeleton
        self.checker = checker
        self.config = config

    def _on_skeleton(self, index: GridIndex) -> bool:
        local = self.skeleton.local_index(index)
        return local is not None and bool(self.skeleton.is_edge[local])

    def via_skeleton(self, a: int, b: int) -> bool:
        vs = self.graph.voxel_size
        found = grid_astar(
            point_to_index(self.graph.position(a), vs),
            point_to_index(self.graph.position(b), vs),
            self._on_skeleton,
            self.config.max_expansions,
        )
        return found is not None

    def via_esdf(self, a: int, b: int) -> Optional[FloatArray]:
        vs = self.graph.voxel_size
        found = grid_astar(
            point_to_index(self.graph.position(a), vs),
            point_to_index(self.graph.position(b), vs),
            self.checker.is_index_traversable,
            self.config.max_expansions,
            self.checker.is_step_valid,
        )
        if found is None:
            return None
        return np.stack([index_to_center(i, vs) for i in found[0]])

    def connect(self, a: int, b: int) -> bool:
        if self.via_skeleton(a, b):
            logger.debug(f"Reconnected {a}-{b} along the skeleton")
            return self.graph.add_edge(a, b)
        points = self.via_esdf(a, b)
        if points is None:
            return False
        tolerance = self.config.straightness_tolerance_voxels * self.graph.voxel_size
        if _max_deviation(points) <= tolerance:
            logger.debug(f"Reconnected {a}-{b} through the ESDF")
            return self.graph.add_edge(a, b)
        try:
            shortened = shorten_path(
                self.checker,
                WaypointPath.from_points(points),
                self.config.max_expansions,
            )
        except PlanningFailedException:
            return False
        chain = [a]
        for waypoint in shortened.waypoints[1:-1]:
            clearance = self.checker.clearance(waypoint)
            chain.append(self.graph.add_vertex(waypoint, clearance or 0.0))
        chain.append(b)
        for u, v in zip(chain[:-1], chain[1:]):
            self.graph.add_edge(u, v)
        logger.info(f"Reconnected {a}-{b} with {len(chain) - 2} inserted vertices")
        return True


def reconnect_subgraphs(
    graph: SparseGraph,
    skeleton: VoxelLayer,
    esdf: DistanceSnapshot,
    config: SkeletonConfig,
    robot_radius: Optional[float] = None,
    pair_attempts: int = 5,
) -> SparseGraph:
    """Join subgraphs whose closest vertices connect on the skeleton or ESDF."""
    radius = config.min_gvd_distance if robot_radius is None else robot_radius
    connected = graph.copy()
    connector = _Connector(
        connected,
        SkeletonGrid.from_layer(skeleton),
        CollisionChecker(esdf, radius),
        config,
    )
    failed: Set[Tuple[int, int]] = set()
    while True:
        components = connected.label_subgraphs()
        merged = False
        for first, second in combinations(components, 2):
            for a, b in _closest_pairs(connected, first, second, pair_attempts):
                if (a, b) in failed:
                    continue
                if connector.connect(a, b):
                    merged = True
                    break
                failed.add((a, b))
            if merged:
                break
        if not merged:
            break
    logger.info(f"Sparse graph has {len(components)} subgraphs after reconnection")
    return connected


@dataclass
class SkeletonResult:
    gvd: VoxelLayer
    skeleton: VoxelLayer
    graph: SparseGraph
    timings: Dict[str, float] = field(default_factory=dict)


class SkeletonGenerator:
    def __init__(
        self, config: SkeletonConfig, robot_radius: Optional[float] = None
    ) -> None:
        self.config = config
        self.robot_radius = robot_radius

    def generate(
        self, esdf: DistanceSnapshot, layer_config: Optional[LayerConfig] = None
    ) -> SkeletonResult:
        timings: Dict[str, float] = {}

        def timed(name: str, started: float) -> None:
            timings[name] = time.perf_counter() - started

        started = time.perf_counter()
        gvd = compute_gvd(esdf, self.config, layer_config)
        timed("gvd", started)

        started = time.perf_counter()
        skeleton = thin_diagram(gvd)
        timed("thin", started)

        started = time.perf_counter()
        graph = build_sparse_graph(skeleton)
        timed("graph", started)

        started = time.perf_counter()
        graph = simplify_graph(
            graph, self.config.simplify_max_displacement_voxels * esdf.voxel_size
        )
        timed("simplify", started)

        started = time.perf_counter()
        graph = reconnect_subgraphs(
            graph, skeleton, esdf, self.config, self.robot_radius
        )
        timed("reconnect", started)
        total = sum(timings.values())
        logger.info(f"Skeleton pipeline {graph.summary()} in {total:.3f}s")
        return SkeletonResult(gvd, skeleton, graph, timings)

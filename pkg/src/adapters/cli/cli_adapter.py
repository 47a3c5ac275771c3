import argparse
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from src.adapters.exceptions import (
    GraphFormatException,
    LayerFormatException,
    ModuleNotFoundException,
    PathFormatException,
    ScanFormatException,
)
from src.adapters.storage.graph_file_adapter import GraphFileAdapter
from src.adapters.storage.layer_file_adapter import LayerFileAdapter
from src.adapters.storage.path_file_adapter import PathFileAdapter
from src.adapters.storage.scan_file_adapter import ScanFileAdapter
from src.adapters.storage.table_file_adapter import TableFileAdapter
from src.common.dto import (
    CameraConfig,
    CollisionMode,
    DistanceMetric,
    EsdfConfig,
    FittingMode,
    ForestConfig,
    GlobalBenchmarkConfig,
    GlobalCellSummary,
    GlobalTrialResult,
    LayerConfig,
    LocalBenchmarkConfig,
    LocoConfig,
    PlannerConfig,
    PlanRecordDTO,
    RunManifest,
    SkeletonConfig,
    SmoothingConfig,
    TrialResult,
    TsdfConfig,
    WeightMode,
)
from src.config import Config, get_config
from src.domain.exceptions import (
    IllConditionedTimesException,
    InvalidLayerException,
    InvalidStartException,
    PlanningFailedException,
    SmoothingFailedException,
)
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.mapping.tsdf_integrator import SensorScan
from src.domain.mapping.voxel_layer import VoxelKind, VoxelLayer
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import PlanningBudget
from src.domain.services.benchmark_service import (
    GLOBAL_PLANNERS,
    GLOBAL_SMOOTHERS,
    LOCAL_METHODS,
    run_global_benchmark,
    run_local_benchmark,
    summarize_global,
)
from src.domain.services.mapping_service import MappingService
from src.domain.services.planning_service import (
    PlanningService,
    load_planner,
    load_smoother,
)
from src.domain.simulation.camera import SimCamera
from src.domain.simulation.forest import generate_forest
from src.domain.simulation.worlds import (
    build_nonconvex_world,
    build_two_room_world,
)
from src.domain.topology.skeletonizer import SkeletonGenerator
from src.domain.topology.sparse_graph import SparseGraph
from src.domain.trajectory.polynomial import sample_trajectory

logger = logging.getLogger()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3

BUNDLED_WORLDS: Dict[str, Callable[[], VoxelLayer]] = {
    "nonconvex": build_nonconvex_world,
    "two-room": build_two_room_world,
}

_SKIPPED_FLAGS = {"handler", "log_level", "manifest_out"}

Point = Tuple[float, float, float]


def _point(text: str) -> Point:
    try:
        x, y, z = (float(value) for value in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z but got {text!r}")
    return (x, y, z)


def _floats(text: str) -> List[float]:
    try:
        return [float(value) for value in text.split(",") if value]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list, got {text!r}")


def _names(choices: Sequence[str]) -> Callable[[str], List[str]]:
    def parse(text: str) -> List[str]:
        names = [name.strip().replace("-", "_") for name in text.split(",") if name]
        unknown = [name for name in names if name not in choices]
        if unknown:
            raise argparse.ArgumentTypeError(
                f"unknown names {unknown}; choose from {sorted(choices)}"
            )
        return names

    return parse


def _overrides(args: argparse.Namespace, mapping: Dict[str, str]) -> Dict[str, Any]:
    """Model fields for the command-line flags that were actually given."""
    values = {}
    for flag, field_name in mapping.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[field_name] = value
    return values


class UsageError(Exception):
    pass


class CommandLineAdapter:
    """Subcommands of the ``vxplan`` tool; handlers return an exit code."""

    def __init__(self, config: Config) -> None:
        self.__config = config
        self.layers = LayerFileAdapter()
        self.tables = TableFileAdapter()
        self.paths = PathFileAdapter()
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="vxplan",
            description="Volumetric mapping and planning toolkit.",
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        parser.add_argument(
            "--log-level",
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
            help="override LOG_LEVEL",
        )
        parser.add_argument(
            "--manifest-out", help="also write the run manifest to this JSON file"
        )
        commands = parser.add_subparsers(dest="command", required=True)
        self._add_map_build(commands)
        self._add_esdf(commands)
        self._add_skeletonize(commands)
        self._add_plan(commands)
        self._add_smooth(commands)
        self._add_bench_local(commands)
        self._add_bench_global(commands)
        self._add_inspect(commands)
        return parser

    @staticmethod
    def _command(
        commands: Any, name: str, help_text: str
    ) -> argparse.ArgumentParser:
        return commands.add_parser(  # type: ignore[no-any-return]
            name,
            help=help_text,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )

    def _add_map_build(self, commands: Any) -> None:
        command = self._command(
            commands, "map-build", "integrate depth scans into a TSDF layer"
        )
        source = command.add_mutually_exclusive_group(required=True)
        source.add_argument("--scans", help="scan record file")
        source.add_argument(
            "--forest-density",
            type=float,
            help="synthesise scans in a cylinder forest of this density",
        )
        command.add_argument("--forest-seed", type=int, default=0)
        command.add_argument(
            "--forest-views", type=int, default=5, help="camera poses along x"
        )
        command.add_argument("--decimation", type=int, default=4)
        command.add_argument("--scans-out", help="write synthesised scans here")
        command.add_argument(
            "--clearing-range",
            type=float,
            help="read scan points at this range or beyond as clearing rays",
        )
        command.add_argument("--out", required=True, help="TSDF layer file")
        command.add_argument("--esdf-out", help="also write a batch ESDF layer")
        command.add_argument("--voxel-size", type=float)
        command.add_argument("--voxels-per-side", type=int)
        command.add_argument("--truncation", type=float)
        command.add_argument("--max-ray-length", type=float)
        command.add_argument(
            "--weight-mode", choices=[mode.value for mode in WeightMode]
        )
        command.set_defaults(handler=self.map_build)

    def _add_esdf_flags(self, command: argparse.ArgumentParser) -> None:
        command.add_argument("--fixed-band", type=float)
        command.add_argument("--max-esdf-distance", type=float)
        command.add_argument(
            "--metric", choices=[metric.value for metric in DistanceMetric]
        )
        command.add_argument("--clear-radius", type=float)
        command.add_argument("--occupied-radius", type=float)

    def _add_esdf(self, commands: Any) -> None:
        command = self._command(commands, "esdf", "convert a TSDF layer to an ESDF")
        command.add_argument("--in", dest="input", required=True)
        command.add_argument("--out", required=True)
        command.add_argument("--truncation", type=float)
        command.add_argument(
            "--robot-position",
            type=_point,
            help="apply clear and occupied spheres around x,y,z",
        )
        self._add_esdf_flags(command)
        command.set_defaults(handler=self.esdf)

    def _add_skeletonize(self, commands: Any) -> None:
        command = self._command(
            commands, "skeletonize", "extract a sparse topology graph from an ESDF"
        )
        command.add_argument("--in", dest="input", required=True)
        command.add_argument("--out", required=True, help="graph text file")
        command.add_argument("--skeleton-out", help="also write the skeleton layer")
        command.add_argument(
            "--metric", choices=[metric.value for metric in DistanceMetric]
        )
        command.add_argument("--min-gvd-distance", type=float)
        command.add_argument("--robot-radius", type=float)
        command.set_defaults(handler=self.skeletonize)

    def _add_map_source(self, command: argparse.ArgumentParser) -> None:
        source = command.add_mutually_exclusive_group(required=True)
        source.add_argument("--map", help="ESDF layer file")
        source.add_argument("--world", choices=sorted(BUNDLED_WORLDS))

    def _add_plan(self, commands: Any) -> None:
        command = self._command(commands, "plan", "plan a global waypoint path")
        command.add_argument(
            "--planner",
            default="rrt-connect",
            choices=["none", "rrt-connect", "rrt-star", "skeleton", "prm"],
        )
        self._add_map_source(command)
        command.add_argument("--graph", help="sparse graph for the skeleton planner")
        command.add_argument("--start", type=_point, required=True)
        command.add_argument("--goal", type=_point, required=True)
        command.add_argument("--seed", type=int, default=0)
        command.add_argument("--budget", type=float, default=1.0, help="seconds")
        command.add_argument(
            "--iterations", type=int, help="fixed iteration budget instead"
        )
        command.add_argument("--robot-radius", type=float)
        command.add_argument(
            "--collision-mode", choices=[mode.value for mode in CollisionMode]
        )
        command.add_argument("--out", default="-", help="waypoint file")
        command.add_argument(
            "--record", help="JSON record file; printed after the waypoints if unset"
        )
        command.set_defaults(handler=self.plan)

    def _add_smooth(self, commands: Any) -> None:
        command = self._command(commands, "smooth", "time-parameterise a path")
        command.add_argument(
            "--method", default="loco", choices=list(GLOBAL_SMOOTHERS)
        )
        command.add_argument(
            "--fit", choices=[mode.value for mode in FittingMode]
        )
        self._add_map_source(command)
        command.add_argument("--path", required=True, help="waypoint file")
        command.add_argument("--v-max", type=float)
        command.add_argument("--a-max", type=float)
        command.add_argument("--robot-radius", type=float)
        command.add_argument("--dt", type=float, default=0.01)
        command.add_argument("--out", default="-", help="trajectory CSV")
        command.set_defaults(handler=self.smooth)

    def _add_bench_local(self, commands: Any) -> None:
        command = self._command(
            commands, "bench-local", "forest local-planning benchmark"
        )
        command.add_argument(
            "--densities", type=_floats, default=[0.1, 0.2, 0.3, 0.4, 0.5]
        )
        command.add_argument("--trials", type=int, default=100)
        command.add_argument(
            "--methods",
            type=_names(list(LOCAL_METHODS)),
            default=list(LOCAL_METHODS),
        )
        command.add_argument("--seed", type=int, default=0)
        command.add_argument("--workers", type=int, default=1)
        command.add_argument("--max-steps", type=int)
        command.add_argument("--decimation", type=int)
        command.add_argument("--no-timings", action="store_true")
        command.add_argument(
            "--episodes-out", help="directory for per-trial JSON-lines logs"
        )
        command.add_argument("--out", default="-")
        command.set_defaults(handler=self.bench_local)

    def _add_bench_global(self, commands: Any) -> None:
        command = self._command(
            commands, "bench-global", "global planner and smoother matrix"
        )
        self._add_map_source(command)
        command.add_argument("--graph")
        command.add_argument("--trials", type=int, default=100)
        command.add_argument("--seed", type=int, default=0)
        command.add_argument(
            "--planners", type=_names(GLOBAL_PLANNERS), default=GLOBAL_PLANNERS
        )
        command.add_argument(
            "--smoothers", type=_names(GLOBAL_SMOOTHERS), default=GLOBAL_SMOOTHERS
        )
        command.add_argument("--deterministic-budgets", action="store_true")
        command.add_argument("--no-timings", action="store_true")
        command.add_argument("--summary-out", help="per-cell summary CSV")
        command.add_argument("--out", default="-")
        command.set_defaults(handler=self.bench_global)

    def _add_inspect(self, commands: Any) -> None:
        command = self._command(commands, "inspect", "print a layer file header")
        command.add_argument("path")
        command.set_defaults(handler=self.inspect)

    def manifest(
        self,
        args: argparse.Namespace,
        inputs: Sequence[Optional[str]] = (),
        outputs: Sequence[Optional[str]] = (),
    ) -> RunManifest:
        flags = {
            name: str(value)
            for name, value in sorted(vars(args).items())
            if name not in _SKIPPED_FLAGS and value is not None
        }
        return RunManifest(
            subcommand=args.command,
            flags=flags,
            seed=getattr(args, "seed", None),
            inputs=[path for path in inputs if path],
            outputs=[path for path in outputs if path and path != "-"],
            tool_version=self.__config.VERSION,
        )

    def _emit_manifest(self, args: argparse.Namespace, manifest: RunManifest) -> None:
        if args.manifest_out:
            with open(args.manifest_out, "w", encoding="utf-8") as handle:
                handle.write(manifest.model_dump_json(indent=2) + "\n")

    def _read_esdf(self, args: argparse.Namespace) -> Tuple[VoxelLayer, Optional[str]]:
        if getattr(args, "world", None):
            return BUNDLED_WORLDS[args.world](), None
        layer, _ = self.layers.read(args.map)
        if layer.kind != VoxelKind.ESDF:
            raise InvalidLayerException(f"{args.map} is not an ESDF layer")
        return layer, args.map

    def _synthesise_scans(self, args: argparse.Namespace) -> List[SensorScan]:
        forest = ForestConfig()
        world = generate_forest(args.forest_density, forest, args.forest_seed)
        camera = SimCamera(CameraConfig(decimation=args.decimation))
        start, goal = world.start_and_goal(LocalBenchmarkConfig().flight_height)
        fractions = np.linspace(0.0, 1.0, max(args.forest_views, 1))
        scans = [
            camera.render(world, start + fraction * (goal - start), 0.0)
            for fraction in fractions
        ]
        logger.info(
            f"Synthesised {len(scans)} scans in a forest of "
            f"{len(world.cylinders)} cylinders"
        )
        return scans

    def map_build(self, args: argparse.Namespace) -> int:
        layer_config = self.__config.settings(
            LayerConfig,
            "layer",
            **_overrides(
                args,
                {"voxel_size": "voxel_size", "voxels_per_side": "voxels_per_side"},
            ),
        )
        tsdf_config = self.__config.settings(
            TsdfConfig,
            "tsdf",
            **_overrides(
                args,
                {
                    "truncation": "truncation_distance",
                    "max_ray_length": "max_ray_length",
                    "weight_mode": "weight_mode",
                },
            ),
        )
        if args.scans:
            scans = ScanFileAdapter(args.clearing_range).read(args.scans)
        else:
            scans = self._synthesise_scans(args)
            if args.scans_out:
                ScanFileAdapter().write(args.scans_out, scans)
        esdf_config = self.__config.settings(EsdfConfig, "esdf")
        band = min(
            max(esdf_config.fixed_band_radius, layer_config.voxel_size),
            tsdf_config.truncation_distance,
        )
        esdf_config = esdf_config.model_copy(update={"fixed_band_radius": band})
        mapping = MappingService(layer_config, tsdf_config, esdf_config)
        mapping.integrate_all(scans, incremental=False)
        manifest = self.manifest(args, [args.scans], [args.out, args.esdf_out])
        self.layers.write(args.out, mapping.tsdf, manifest)
        if args.esdf_out:
            self.layers.write(args.esdf_out, mapping.esdf, manifest)
        self._emit_manifest(args, manifest)
        diagnostics = mapping.diagnostics
        print(
            f"scans={diagnostics.scans} rays={diagnostics.rays} "
            f"skipped={diagnostics.skipped_non_finite} "
            f"blocks={len(mapping.tsdf.blocks)}"
        )
        return EXIT_OK

    def esdf(self, args: argparse.Namespace) -> int:
        tsdf, _ = self.layers.read(args.input)
        if tsdf.kind != VoxelKind.TSDF:
            raise InvalidLayerException(f"{args.input} is not a TSDF layer")
        tsdf_config = self.__config.settings(
            TsdfConfig,
            "tsdf",
            **_overrides(args, {"truncation": "truncation_distance"}),
        )
        esdf_config = self.__config.settings(
            EsdfConfig,
            "esdf",
            **_overrides(
                args,
                {
                    "fixed_band": "fixed_band_radius",
                    "max_esdf_distance": "max_esdf_distance",
                    "metric": "metric",
                    "clear_radius": "clear_radius",
                    "occupied_radius": "occupied_radius",
                },
            ),
        )
        if esdf_config.default_distance < esdf_config.max_esdf_distance:
            esdf_config = esdf_config.model_copy(
                update={"default_distance": esdf_config.max_esdf_distance}
            )
        mapping = MappingService(tsdf.config, tsdf_config, esdf_config, tsdf=tsdf)
        summary = mapping.update_esdf()
        if args.robot_position is not None:
            mapping.apply_spheres(args.robot_position)
        manifest = self.manifest(args, [args.input], [args.out])
        self.layers.write(args.out, mapping.esdf, manifest)
        self._emit_manifest(args, manifest)
        print(
            f"lowered={summary.lowered} raised={summary.raised} "
            f"blocks={len(mapping.esdf.blocks)}"
        )
        return EXIT_OK

    def skeletonize(self, args: argparse.Namespace) -> int:
        esdf, _ = self.layers.read(args.input)
        if esdf.kind != VoxelKind.ESDF:
            raise InvalidLayerException(f"{args.input} is not an ESDF layer")
        skeleton_config = self.__config.settings(
            SkeletonConfig,
            "skeleton",
            **_overrides(
                args, {"metric": "metric", "min_gvd_distance": "min_gvd_distance"}
            ),
        )
        result = SkeletonGenerator(skeleton_config, args.robot_radius).generate(
            DistanceSnapshot.from_layer(esdf), esdf.config
        )
        manifest = self.manifest(args, [args.input], [args.out, args.skeleton_out])
        GraphFileAdapter().write(args.out, result.graph, manifest)
        if args.skeleton_out:
            self.layers.write(args.skeleton_out, result.skeleton, manifest)
        self._emit_manifest(args, manifest)
        timings = " ".join(f"{k}={v:.3f}s" for k, v in result.timings.items())
        print(f"{json.dumps(result.graph.summary())} {timings}")
        return EXIT_OK

    def _read_graph(
        self, path: Optional[str], voxel_size: float
    ) -> Optional[SparseGraph]:
        if not path:
            return None
        return GraphFileAdapter(default_voxel_size=voxel_size).read(path)

    def plan(self, args: argparse.Namespace) -> int:
        if args.planner == "skeleton" and not args.graph:
            raise UsageError("the skeleton planner needs --graph")
        layer, source = self._read_esdf(args)
        planner_config = self.__config.settings(
            PlannerConfig,
            "planner",
            **_overrides(
                args,
                {"robot_radius": "robot_radius", "collision_mode": "collision_mode"},
            ),
        )
        snapshot = DistanceSnapshot.from_layer(layer)
        checker = CollisionChecker(
            snapshot, planner_config.robot_radius, planner_config.collision_mode
        )
        budget = (
            PlanningBudget(iterations=args.iterations)
            if args.iterations
            else PlanningBudget(seconds=args.budget)
        )
        planner = load_planner(
            args.planner,
            checker,
            planner_config,
            graph=self._read_graph(args.graph, layer.voxel_size),
            roadmap_budget=budget,
        )
        result = PlanningService(planner).plan(
            args.start, args.goal, budget, seed=args.seed
        )
        manifest = self.manifest(
            args, [source, args.graph], [args.out, args.record]
        )
        record = PlanRecordDTO(
            success=result.success,
            planner=args.planner,
            length_m=result.length,
            plan_time_s=result.plan_time_s,
            waypoints=(
                result.path.waypoints.tolist()
                if result.success and result.path is not None
                else []
            ),
            manifest=manifest,
        )
        if result.success and result.path is not None:
            self.paths.write(args.out, result.path, manifest)
        if args.record:
            with open(args.record, "w", encoding="utf-8") as handle:
                handle.write(record.model_dump_json(indent=2) + "\n")
        else:
            print(record.model_dump_json())
        self._emit_manifest(args, manifest)
        if not result.success:
            logger.warning(f"Planning failed: {result.message}")
            return EXIT_FAILURE
        return EXIT_OK

    def smooth(self, args: argparse.Namespace) -> int:
        layer, source = self._read_esdf(args)
        path = self.paths.read(args.path)
        smoothing = self.__config.settings(
            SmoothingConfig,
            "smoothing",
            **_overrides(
                args,
                {"v_max": "v_max", "a_max": "a_max", "robot_radius": "robot_radius"},
            ),
        )
        loco = self.__config.settings(
            LocoConfig, "loco", **_overrides(args, {"fit": "fitting_mode"})
        )
        snapshot = DistanceSnapshot.from_layer(layer)
        smoother = load_smoother(args.method, snapshot, smoothing, loco)
        trajectory = smoother.smooth(path)
        manifest = self.manifest(args, [source, args.path], [args.out])
        self.paths.write_trajectory(
            args.out, sample_trajectory(trajectory, args.dt), manifest
        )
        self._emit_manifest(args, manifest)
        logger.info(
            f"{args.method}: {trajectory.duration:.2f}s, "
            f"{trajectory.length():.2f}m"
        )
        return EXIT_OK

    def bench_local(self, args: argparse.Namespace) -> int:
        config = LocalBenchmarkConfig(workers=args.workers)
        update: Dict[str, Any] = _overrides(args, {"max_steps": "max_steps"})
        if args.decimation is not None:
            update["camera"] = config.camera.model_copy(
                update={"decimation": args.decimation}
            )
        config = config.model_copy(update=update)
        outcomes = run_local_benchmark(
            args.methods,
            args.densities,
            args.trials,
            args.seed,
            config,
            timings=not args.no_timings,
        )
        collided = sum(outcome.collided for outcome in outcomes)
        if collided:
            logger.warning(f"{collided}/{len(outcomes)} trials broke the clearance")
        manifest = self.manifest(args, [], [args.out, args.episodes_out])
        self.tables.write(
            args.out, [outcome.result for outcome in outcomes], TrialResult, manifest
        )
        if args.episodes_out:
            os.makedirs(args.episodes_out, exist_ok=True)
            for outcome in outcomes:
                row = outcome.result
                name = f"{row.method}_{row.density:g}_{row.trial}.jsonl"
                with open(
                    os.path.join(args.episodes_out, name), "w", encoding="utf-8"
                ) as handle:
                    handle.writelines(line + "\n" for line in outcome.episode)
        self._emit_manifest(args, manifest)
        return EXIT_OK

    def bench_global(self, args: argparse.Namespace) -> int:
        layer, source = self._read_esdf(args)
        config = GlobalBenchmarkConfig(
            deterministic_budgets=args.deterministic_budgets
        )
        rows = run_global_benchmark(
            DistanceSnapshot.from_layer(layer),
            self._read_graph(args.graph, layer.voxel_size),
            args.trials,
            args.seed,
            config,
            planners=args.planners,
            smoothers=args.smoothers,
            timings=not args.no_timings,
        )
        manifest = self.manifest(
            args, [source, args.graph], [args.out, args.summary_out]
        )
        self.tables.write(args.out, rows, GlobalTrialResult, manifest)
        if args.summary_out:
            self.tables.write(
                args.summary_out,
                summarize_global(rows),
                GlobalCellSummary,
                manifest,
            )
        self._emit_manifest(args, manifest)
        return EXIT_OK

    def inspect(self, args: argparse.Namespace) -> int:
        layer, manifest = self.layers.read(args.path)
        print(f"voxel_size: {layer.voxel_size!r}")
        print(f"voxels_per_side: {layer.voxels_per_side}")
        print(f"kind: {layer.kind.name}")
        print(f"blocks: {len(layer.blocks)}")
        if manifest is not None:
            print(f"manifest: {manifest.model_dump_json()}")
        return EXIT_OK

    def run(self, argv: Sequence[str]) -> int:
        try:
            args = self.parser.parse_args(list(argv))
        except SystemExit as exit_:
            return exit_.code if isinstance(exit_.code, int) else EXIT_USAGE
        if args.log_level:
            self.__config.set_log_level(args.log_level)
        handler: Callable[[argparse.Namespace], int] = args.handler
        try:
            return handler(args)
        except (UsageError, ValidationError, ValueError) as error:
            self._report(error)
            return EXIT_USAGE
        except (
            PlanningFailedException,
            SmoothingFailedException,
            IllConditionedTimesException,
            InvalidStartException,
        ) as error:
            self._report(error)
            return EXIT_FAILURE
        except (
            OSError,
            LayerFormatException,
            ScanFormatException,
            GraphFormatException,
            PathFormatException,
            InvalidLayerException,
            ModuleNotFoundException,
        ) as error:
            self._report(error)
            return EXIT_IO
        except Exception as error:
            logger.exception(error)
            self._report(error)
            return EXIT_FAILURE

    @staticmethod
    def _report(error: Exception) -> None:
        print(f"vxplan: error: {error}", file=sys.stderr)


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    adapter = CommandLineAdapter(get_config())
    return adapter.run(sys.argv[1:] if argv is None else argv)

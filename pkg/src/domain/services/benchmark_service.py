"""Seeded local and global planning benchmarks.

Local trials fly a simulated camera through a forest world for a fixed
number of one-second steps. Global trials sample start/goal pairs on a
map and run every planner/smoother combination on each pair.
"""

import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.common.dto import (
    GlobalBenchmarkConfig,
    GlobalCellSummary,
    GlobalTrialResult,
    IntermediateStrategy,
    LocalBenchmarkConfig,
    LocalPlannerConfig,
    TrialResult,
)
from src.domain.exceptions import (
    IllConditionedTimesException,
    InvalidLayerException,
    InvalidStartException,
    NoCandidatesException,
    PlanningFailedException,
    SmoothingFailedException,
)
from src.domain.local.replanner import ReplanAction
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.grid_planner import astar_esdf
from src.domain.planning.paths import PlanningBudget
from src.domain.services.local_planner_service import LocalPlanner
from src.domain.services.mapping_service import MappingService
from src.domain.services.planning_service import (
    PlanningService,
    load_planner,
    load_smoother,
)
from src.domain.simulation.camera import SimCamera
from src.domain.simulation.forest import generate_forest
from src.domain.topology.sparse_graph import SparseGraph

logger = logging.getLogger()

LOCAL_METHODS: Dict[str, Dict[str, object]] = {
    "loco_raw": {"use_shotgun": False},
    "shotgun_no_path": {"use_shotgun": True, "use_shotgun_path": False},
    "shotgun": {"use_shotgun": True},
    "loco_random": {
        "use_shotgun": False,
        "intermediate_strategy": IntermediateStrategy.RANDOM,
    },
    "loco_explore": {
        "use_shotgun": False,
        "intermediate_strategy": IntermediateStrategy.EXPLORATION,
    },
    "shotgun_random": {
        "use_shotgun": True,
        "intermediate_strategy": IntermediateStrategy.RANDOM,
    },
    "shotgun_explore": {
        "use_shotgun": True,
        "intermediate_strategy": IntermediateStrategy.EXPLORATION,
    },
}

GLOBAL_PLANNERS = ["none", "rrt_connect", "rrt_star", "skeleton", "prm"]
GLOBAL_SMOOTHERS = ["none", "ramp", "poly", "loco"]

TRIAL_ERRORS = (
    IllConditionedTimesException,
    InvalidLayerException,
    InvalidStartException,
    NoCandidatesException,
    PlanningFailedException,
    SmoothingFailedException,
)


@dataclass
class LocalTrialTask:
    method: str
    density: float
    trial: int
    seed: int
    config: LocalBenchmarkConfig
    planner: LocalPlannerConfig
    timings: bool = True


@dataclass
class LocalTrialOutcome:
    result: TrialResult
    episode: List[str] = field(default_factory=list)
    min_clearance_m: float = math.inf
    collided: bool = False
    aborted: Optional[str] = None


def method_config(
    method: str, base: LocalPlannerConfig, config: LocalBenchmarkConfig, seed: int
) -> LocalPlannerConfig:
    if method not in LOCAL_METHODS:
        raise ValueError(f"Unknown local method {method!r}")
    update: Dict[str, object] = {
        "use_shotgun_path": True,
        "intermediate_strategy": IntermediateStrategy.NONE,
        "voxel_size": config.layer.voxel_size,
        "camera": config.camera,
        "seed": seed,
    }
    update.update(LOCAL_METHODS[method])
    return base.model_copy(update=update)


def run_local_trial(task: LocalTrialTask) -> LocalTrialOutcome:
    """One forest episode; failures end the episode and are recorded."""
    config = task.config
    seed = task.seed + task.trial
    world = generate_forest(task.density, config.forest, seed)
    start, goal = world.start_and_goal(config.flight_height)
    planner_config = method_config(task.method, task.planner, config, seed)
    camera = SimCamera(config.camera)
    mapping = MappingService(config.layer, config.tsdf, config.esdf)
    planner = LocalPlanner(planner_config, start)
    planner.set_goal(goal)

    initial = float(np.linalg.norm(goal - start))
    path_length = 0.0
    min_clearance = math.inf
    replan_s = {"shotgun": 0.0, "loco": 0.0}
    steps = 0
    success = False
    aborted: Optional[str] = None
    try:
        for steps in range(1, config.max_steps + 1):
            scan = camera.render(world, planner.position, planner.yaw)
            mapping.update_esdf(mapping.integrate(scan))
            mapping.apply_spheres(planner.position)
            started = time.perf_counter()
            outcome = planner.step(mapping.snapshot())
            elapsed = time.perf_counter() - started
            searched = planner_config.use_shotgun and outcome.action in (
                ReplanAction.SHOTGUN,
                ReplanAction.INTERMEDIATE,
            )
            replan_s["shotgun" if searched else "loco"] += elapsed

            before = planner.position
            samples = planner.advance(config.step_seconds)
            if len(samples.positions):
                trace = np.vstack([before[None, :], samples.positions])
                path_length += float(
                    np.linalg.norm(np.diff(trace, axis=0), axis=1).sum()
                )
                clearance, _ = world.interpolate_many(samples.positions)
                min_clearance = min(min_clearance, float(clearance.min()))
            if planner.distance_to_goal() <= planner_config.success_threshold:
                success = True
                break
    except TRIAL_ERRORS as error:
        aborted = f"{type(error).__name__}: {error}"
        logger.warning(
            f"Trial {task.method}/{task.density}/{task.trial} aborted: {error}"
        )
    collided = min_clearance < planner_config.robot_radius
    if collided:
        logger.warning(
            f"Trial {task.method}/{task.density}/{task.trial} came within "
            f"{min_clearance:.3f}m of an obstacle"
        )

    result = TrialResult(
        method=task.method,
        density=task.density,
        trial=task.trial,
        success=success,
        steps=steps,
        path_len_m=path_length,
        init_dist_m=initial,
        final_dist_m=planner.distance_to_goal(),
    )
    if task.timings:
        result.tsdf_ms = 1e3 * mapping.timings.tsdf_s
        result.esdf_ms = 1e3 * mapping.timings.esdf_s
        result.shotgun_ms = 1e3 * replan_s["shotgun"]
        result.loco_ms = 1e3 * replan_s["loco"]
    return LocalTrialOutcome(
        result, planner.log_lines(), min_clearance, collided, aborted
    )


def run_local_benchmark(
    methods: Sequence[str],
    densities: Sequence[float],
    trials: int,
    seed: int,
    config: Optional[LocalBenchmarkConfig] = None,
    planner: Optional[LocalPlannerConfig] = None,
    timings: bool = True,
) -> List[LocalTrialOutcome]:
    """Rows ordered by method, density and trial whatever the worker count."""
    config = config or LocalBenchmarkConfig()
    planner = planner or LocalPlannerConfig()
    for method in methods:
        if method not in LOCAL_METHODS:
            raise ValueError(f"Unknown local method {method!r}")
    tasks = [
        LocalTrialTask(method, density, trial, seed, config, planner, timings)
        for method in methods
        for density in densities
        for trial in range(trials)
    ]
    logger.info(
        f"Local benchmark: {len(tasks)} trials on {config.workers} workers"
    )
    if config.workers == 1:
        outcomes = [run_local_trial(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            outcomes = list(executor.map(run_local_trial, tasks))
    return outcomes


def _budgets(config: GlobalBenchmarkConfig) -> Dict[str, PlanningBudget]:
    def budget(seconds: float) -> PlanningBudget:
        return PlanningBudget.from_seconds(
            seconds,
            config.deterministic_budgets,
            config.planner.iterations_per_second,
        )

    return {
        "none": budget(config.rrt_connect_budget_s),
        "rrt_connect": budget(config.rrt_connect_budget_s),
        "rrt_star": budget(config.rrt_star_budget_s),
        "skeleton": budget(config.rrt_connect_budget_s),
        "prm": budget(config.prm_query_budget_s),
        "prm_roadmap": budget(config.prm_roadmap_budget_s),
    }


def sample_query_pair(
    checker: CollisionChecker,
    candidates: FloatArray,
    rng: np.random.Generator,
    config: GlobalBenchmarkConfig,
) -> Optional[Tuple[FloatArray, FloatArray]]:
    """Start and goal at least ``min_pair_distance`` apart with a grid path."""
    if len(candidates) < 2:
        return None
    for _ in range(config.max_resample_attempts):
        first, second = rng.choice(len(candidates), size=2, replace=False)
        start, goal = candidates[first], candidates[second]
        if np.linalg.norm(goal - start) < config.min_pair_distance:
            continue
        found = astar_esdf(checker, start, goal, config.planner.grid_max_expansions)
        if found.success:
            return start, goal
    return None


def run_global_benchmark(
    snapshot: DistanceSnapshot,
    graph: Optional[SparseGraph],
    trials: int,
    seed: int,
    config: Optional[GlobalBenchmarkConfig] = None,
    planners: Sequence[str] = GLOBAL_PLANNERS,
    smoothers: Sequence[str] = GLOBAL_SMOOTHERS,
    timings: bool = True,
) -> List[GlobalTrialResult]:
    config = config or GlobalBenchmarkConfig()
    checker = CollisionChecker(
        snapshot, config.planner.robot_radius, config.planner.collision_mode
    )
    candidates = snapshot.observed_centers(config.planner.robot_radius)
    candidates = candidates[checker.states_valid(candidates)]
    budgets = _budgets(config)
    smoothing = config.smoothing.model_copy(
        update={"robot_radius": config.planner.robot_radius}
    )
    if graph is None and "skeleton" in planners:
        logger.warning("No sparse graph given, skipping the skeleton planner")
        planners = [name for name in planners if name != "skeleton"]
    services: Dict[str, List[Tuple[str, PlanningService]]] = {}
    for planner_name in planners:
        adapter = load_planner(
            planner_name,
            checker,
            config.planner,
            graph=graph,
            roadmap_budget=budgets["prm_roadmap"],
        )
        services[planner_name] = [
            (
                smoother_name,
                PlanningService(
                    adapter,
                    load_smoother(smoother_name, snapshot, smoothing, config.loco),
                ),
            )
            for smoother_name in smoothers
        ]

    rng = np.random.default_rng(seed)
    rows: List[GlobalTrialResult] = []
    for trial in range(trials):
        pair = sample_query_pair(checker, candidates, rng, config)
        if pair is None:
            logger.warning(
                f"Trial {trial}: no solvable pair after "
                f"{config.max_resample_attempts} attempts, skipped"
            )
            continue
        start, goal = pair
        for planner_name in planners:
            plan_service = services[planner_name][0][1]
            plan = plan_service.plan(
                start, goal, budgets[planner_name], seed=seed + trial
            )
            for smoother_name, service in services[planner_name]:
                row = GlobalTrialResult(
                    planner=planner_name,
                    smoother=smoother_name,
                    trial=trial,
                    success=False,
                )
                if timings:
                    row.plan_ms = 1e3 * plan.plan_time_s
                if plan.success and plan.path is not None:
                    smoothed = service.smooth_plan(plan)
                    row.success = smoothed.success
                    if timings:
                        row.smooth_ms = 1e3 * smoothed.smooth_time_s
                    if smoothed.trajectory is not None:
                        row.length_m = smoothed.trajectory.length()
                rows.append(row)
    return rows


def summarize_global(rows: Sequence[GlobalTrialResult]) -> List[GlobalCellSummary]:
    """Success fraction and median times per (planner, smoother) cell."""
    cells: Dict[Tuple[str, str], List[GlobalTrialResult]] = {}
    for row in rows:
        cells.setdefault((row.planner, row.smoother), []).append(row)
    summaries = []
    for (planner, smoother), cell in cells.items():
        smoothed = [row.smooth_ms for row in cell if row.success]
        summaries.append(
            GlobalCellSummary(
                planner=planner,
                smoother=smoother,
                trials=len(cell),
                success_fraction=sum(row.success for row in cell) / len(cell),
                median_plan_ms=statistics.median(row.plan_ms for row in cell),
                median_smooth_ms=statistics.median(smoothed) if smoothed else 0.0,
            )
        )
    return summaries

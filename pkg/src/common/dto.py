from enum import Enum
from typing import Annotated, Dict, List, Optional

from annotated_types import Ge, Gt, Le
from pydantic import BaseModel, Field, model_validator
from typing_extensions import Self, TypedDict


class WeightMode(str, Enum):
    CONSTANT = "constant"
    INVERSE_SQUARE_DEPTH = "inverse_square_depth"


class DistanceMetric(str, Enum):
    QUASI_EUCLIDEAN = "quasi"
    FULL_EUCLIDEAN = "full"


class CollisionMode(str, Enum):
    ESDF_POINT = "esdf_point"
    TSDF_SPHERE = "tsdf_sphere"


class FittingMode(str, Enum):
    WAYPOINT_FIT = "waypoint"
    POLYNOMIAL_RESAMPLE = "poly-resample"
    VISIBILITY_RESAMPLE = "vis-resample"


class IntermediateStrategy(str, Enum):
    NONE = "none"
    RANDOM = "random"
    EXPLORATION = "exploration"


class LayerConfig(BaseModel):
    voxel_size: Annotated[float, Gt(0)] = 0.1
    voxels_per_side: Annotated[int, Ge(1)] = 16

    @model_validator(mode="after")
    def check_power_of_two(self) -> Self:
        if self.voxels_per_side & (self.voxels_per_side - 1):
            raise ValueError("voxels_per_side must be a power of two")
        return self


class TsdfConfig(BaseModel):
    truncation_distance: Annotated[float, Gt(0)] = 0.2
    max_ray_length: Annotated[float, Gt(0)] = 8.0
    min_ray_length: Annotated[float, Ge(0)] = 0.1
    max_weight: Annotated[float, Gt(0)] = 10000.0
    weight_mode: WeightMode = WeightMode.CONSTANT

    @model_validator(mode="after")
    def check_ray_lengths(self) -> Self:
        if self.max_ray_length <= self.truncation_distance:
            raise ValueError(
                "max_ray_length must exceed truncation_distance"
            )
        return self

    def check_against(self, layer: LayerConfig) -> None:
        if self.truncation_distance < layer.voxel_size:
            raise ValueError(
                "truncation_distance must be at least one voxel"
            )


class EsdfConfig(BaseModel):
    fixed_band_radius: Annotated[float, Gt(0)] = 0.1
    max_esdf_distance: Annotated[float, Gt(0)] = 4.0
    default_distance: Annotated[float, Gt(0)] = 4.0
    metric: DistanceMetric = DistanceMetric.QUASI_EUCLIDEAN
    tie_epsilon: Annotated[float, Ge(0)] = 1e-6
    clear_radius: Annotated[float, Ge(0)] = 1.0
    occupied_radius: Annotated[float, Ge(0)] = 4.0

    @model_validator(mode="after")
    def check_distances(self) -> Self:
        if self.default_distance < self.max_esdf_distance:
            raise ValueError(
                "default_distance must be at least max_esdf_distance"
            )
        if self.occupied_radius and self.clear_radius >= self.occupied_radius:
            raise ValueError("clear_radius must be below occupied_radius")
        return self

    def check_against(self, layer: LayerConfig, tsdf: TsdfConfig) -> None:
        if not (
            layer.voxel_size
            <= self.fixed_band_radius
            <= tsdf.truncation_distance
        ):
            raise ValueError(
                "fixed_band_radius must lie between one voxel and the "
                "truncation distance"
            )


class SkeletonConfig(BaseModel):
    metric: DistanceMetric = DistanceMetric.QUASI_EUCLIDEAN
    min_gvd_distance: Annotated[float, Ge(0)] = 0.5
    full_separation_angle_deg: Annotated[float, Gt(0), Le(180)] = 45.0
    quasi_separation_angle_deg: Annotated[float, Gt(0), Le(180)] = 90.0
    face_threshold: Annotated[int, Ge(0), Le(26)] = 9
    edge_threshold: Annotated[int, Ge(0), Le(26)] = 12
    vertex_threshold: Annotated[int, Ge(0), Le(26)] = 16
    simplify_max_displacement_voxels: Annotated[float, Ge(0)] = 2.0
    straightness_tolerance_voxels: Annotated[float, Ge(0)] = 4.0
    max_expansions: Annotated[int, Ge(1)] = 500_000

    @model_validator(mode="after")
    def check_thresholds(self) -> Self:
        if not (
            self.face_threshold <= self.edge_threshold <= self.vertex_threshold
        ):
            raise ValueError("thresholds must nest face <= edge <= vertex")
        return self

    @property
    def separation_angle_deg(self) -> float:
        if self.metric == DistanceMetric.FULL_EUCLIDEAN:
            return self.full_separation_angle_deg
        return self.quasi_separation_angle_deg


class PlannerConfig(BaseModel):
    robot_radius: Annotated[float, Ge(0)] = 0.5
    collision_mode: CollisionMode = CollisionMode.ESDF_POINT
    steer_voxels: Annotated[float, Gt(0)] = 10.0
    goal_bias: Annotated[float, Ge(0), Le(1)] = 0.05
    rrt_star_gamma: Annotated[float, Gt(0)] = 3.0
    prm_neighbors: Annotated[int, Ge(1)] = 10
    prm_roadmap_samples: Annotated[int, Ge(1)] = 400
    grid_max_expansions: Annotated[int, Ge(1)] = 500_000
    skeleton_nearest: Annotated[int, Ge(1)] = 5
    iterations_per_second: Annotated[int, Ge(1)] = 2000


class SmoothingConfig(BaseModel):
    v_max: Annotated[float, Gt(0)] = 1.0
    a_max: Annotated[float, Gt(0)] = 1.0
    robot_radius: Annotated[float, Ge(0)] = 0.5
    derivative_order: Annotated[int, Ge(3), Le(4)] = 4
    min_segment_time: Annotated[float, Gt(0)] = 0.05
    max_splits: Annotated[int, Ge(0)] = 10
    check_dt: Annotated[float, Gt(0)] = 0.001


class LocoConfig(BaseModel):
    derivative_weight: Annotated[float, Ge(0)] = 0.1
    collision_weight: Annotated[float, Ge(0)] = 10.0
    epsilon: Annotated[float, Gt(0)] = 0.5
    robot_radius: Annotated[float, Ge(0)] = 0.5
    segments: Annotated[int, Ge(1)] = 3
    dt: Annotated[float, Gt(0)] = 0.05
    fitting_mode: FittingMode = FittingMode.VISIBILITY_RESAMPLE
    derivative_order: Annotated[int, Ge(3), Le(4)] = 4
    max_iterations: Annotated[int, Ge(1)] = 100
    tolerance: Annotated[float, Gt(0)] = 1e-4
    armijo_c: Annotated[float, Gt(0), Le(1)] = 1e-4
    initial_step: Annotated[float, Gt(0)] = 1.0
    max_backtracks: Annotated[int, Ge(1)] = 30
    v_max: Annotated[float, Gt(0)] = 1.0
    a_max: Annotated[float, Gt(0)] = 1.0
    audit_dt: Annotated[float, Gt(0)] = 0.001


class ShotgunConfig(BaseModel):
    n_particles: Annotated[int, Ge(1)] = 20
    max_iterations: Annotated[int, Ge(1)] = 300
    p_goal: Annotated[float, Ge(0), Le(1)] = 0.5
    p_clearance: Annotated[float, Ge(0), Le(1)] = 0.2
    p_random: Annotated[float, Ge(0), Le(1)] = 0.3
    seed: int = 0

    @model_validator(mode="after")
    def check_probabilities(self) -> Self:
        total = self.p_goal + self.p_clearance + self.p_random
        if abs(total - 1.0) > 1e-9:
            raise ValueError("move probabilities must sum to 1")
        return self


class CameraConfig(BaseModel):
    width: Annotated[int, Ge(1)] = 320
    height: Annotated[int, Ge(1)] = 240
    horizontal_fov_deg: Annotated[float, Gt(0), Le(179)] = 90.0
    max_range: Annotated[float, Gt(0)] = 5.0
    decimation: Annotated[int, Ge(1)] = 1


class ExplorationConfig(BaseModel):
    samples: Annotated[int, Ge(1)] = 20
    radius: Annotated[float, Gt(0)] = 2.0
    gain_weight: Annotated[float, Ge(0)] = 1.0
    progress_weight: Annotated[float, Ge(0)] = 100.0
    max_attempts: Annotated[int, Ge(1)] = 500
    yaw_candidates: Annotated[int, Ge(1)] = 4
    occlusion: bool = False


class LocalPlannerConfig(BaseModel):
    robot_radius: Annotated[float, Ge(0)] = 0.35
    voxel_size: Annotated[float, Gt(0)] = 0.2
    lock_horizon: Annotated[float, Ge(0)] = 0.5
    sample_dt: Annotated[float, Gt(0)] = 0.01
    verify_horizon: Annotated[float, Gt(0)] = 30.0
    v_max: Annotated[float, Gt(0)] = 1.0
    a_max: Annotated[float, Gt(0)] = 1.0
    success_threshold_voxels: Annotated[float, Gt(0)] = 2.0
    min_waypoint_spacing_voxels: Annotated[float, Ge(0)] = 2.0
    intermediate_expiry_s: Annotated[float, Gt(0)] = 30.0
    random_goal_radius: Annotated[float, Ge(0)] = 2.0
    use_shotgun: bool = True
    use_shotgun_path: bool = True
    intermediate_strategy: IntermediateStrategy = IntermediateStrategy.NONE
    seed: int = 0
    loco: LocoConfig = Field(default_factory=LocoConfig)
    shotgun: ShotgunConfig = Field(default_factory=ShotgunConfig)
    exploration: ExplorationConfig = Field(default_factory=ExplorationConfig)
    camera: CameraConfig = Field(default_factory=CameraConfig)

    @property
    def success_threshold(self) -> float:
        return self.success_threshold_voxels * self.voxel_size


class ForestConfig(BaseModel):
    extent_x: Annotated[float, Gt(0)] = 15.0
    extent_y: Annotated[float, Gt(0)] = 15.0
    extent_z: Annotated[float, Gt(0)] = 5.0
    free_margin: Annotated[float, Ge(0)] = 2.0
    min_radius: Annotated[float, Gt(0)] = 0.3
    max_radius: Annotated[float, Gt(0)] = 0.6


class LocalBenchmarkConfig(BaseModel):
    layer: LayerConfig = Field(
        default_factory=lambda: LayerConfig(voxel_size=0.2)
    )
    tsdf: TsdfConfig = Field(
        default_factory=lambda: TsdfConfig(truncation_distance=0.4)
    )
    esdf: EsdfConfig = Field(
        default_factory=lambda: EsdfConfig(
            fixed_band_radius=0.2,
            max_esdf_distance=2.0,
            default_distance=2.0,
            clear_radius=1.0,
            occupied_radius=2.0,
        )
    )
    forest: ForestConfig = Field(default_factory=ForestConfig)
    camera: CameraConfig = Field(
        default_factory=lambda: CameraConfig(decimation=8)
    )
    max_steps: Annotated[int, Ge(1)] = 60
    step_seconds: Annotated[float, Gt(0)] = 1.0
    flight_height: Annotated[float, Gt(0)] = 1.5
    workers: Annotated[int, Ge(1)] = 1


class GlobalBenchmarkConfig(BaseModel):
    planner: PlannerConfig = Field(default_factory=PlannerConfig)
    smoothing: SmoothingConfig = Field(default_factory=SmoothingConfig)
    loco: LocoConfig = Field(
        default_factory=lambda: LocoConfig(
            fitting_mode=FittingMode.POLYNOMIAL_RESAMPLE
        )
    )
    min_pair_distance: Annotated[float, Ge(0)] = 2.0
    max_resample_attempts: Annotated[int, Ge(1)] = 100
    rrt_connect_budget_s: Annotated[float, Gt(0)] = 1.0
    rrt_star_budget_s: Annotated[float, Gt(0)] = 2.0
    prm_roadmap_budget_s: Annotated[float, Gt(0)] = 2.0
    prm_query_budget_s: Annotated[float, Gt(0)] = 0.1
    deterministic_budgets: bool = False


class TrialResult(BaseModel):
    method: str
    density: float
    trial: int
    success: bool
    steps: int
    path_len_m: float
    init_dist_m: float
    final_dist_m: float
    tsdf_ms: float = 0.0
    esdf_ms: float = 0.0
    shotgun_ms: float = 0.0
    loco_ms: float = 0.0


class GlobalTrialResult(BaseModel):
    planner: str
    smoother: str
    trial: int
    success: bool
    plan_ms: float = 0.0
    smooth_ms: float = 0.0
    length_m: float = 0.0


class GlobalCellSummary(BaseModel):
    planner: str
    smoother: str
    trials: int
    success_fraction: float
    median_plan_ms: float
    median_smooth_ms: float


class RunManifest(BaseModel):
    subcommand: str
    flags: Dict[str, str] = Field(default_factory=dict)
    seed: Optional[int] = None
    inputs: List[str] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=list)
    tool_version: str


class PlanRecordDTO(BaseModel):
    success: bool
    planner: str
    length_m: float
    plan_time_s: float
    waypoints: List[List[float]] = Field(default_factory=list)
    manifest: Optional[RunManifest] = None


class RobotStateDict(TypedDict):
    time: float
    position: List[float]
    velocity: List[float]
    yaw: float


class EpisodeLogRecord(BaseModel):
    step: int
    robot_state: RobotStateDict
    action: str
    suffix_duration_s: float
    distance_to_goal_m: float

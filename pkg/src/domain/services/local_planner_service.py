import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from src.common.dto import EpisodeLogRecord, LocalPlannerConfig, RobotStateDict
from src.domain.local.replanner import (
    ReplanOutcome,
    ReplanState,
    replan_step,
    verify_trajectory,
)
from src.domain.local.waypoint_queue import WaypointQueue, WaypointTag
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.collision import CollisionChecker
from src.domain.trajectory.polynomial import Trajectory, TrajectorySamples, yaw_profile

logger = logging.getLogger()

_INITIAL_HOLD = 1e-3


class LocalPlanner:
    """Owns the waypoint queue, the active trajectory and the episode log.

    ``step`` replans against a frozen map snapshot; ``advance`` moves the
    execution cursor and returns the samples executed on the way, on a
    fixed global tick grid so timestamps never repeat.
    """

    def __init__(
        self,
        config: LocalPlannerConfig,
        start: Sequence[float],
        start_time: float = 0.0,
        initial_yaw: float = 0.0,
    ) -> None:
        self.config = config
        position = np.asarray(start, dtype=np.float64)
        self.state = ReplanState(
            Trajectory.stationary(position, _INITIAL_HOLD, start_time),
            cursor=start_time,
            lock_horizon=config.lock_horizon,
        )
        self.queue = WaypointQueue(
            reach_tolerance=config.success_threshold,
            min_spacing=config.min_waypoint_spacing_voxels * config.voxel_size,
            expiry=config.intermediate_expiry_s,
        )
        self.rng = np.random.default_rng(config.seed)
        self.log: List[EpisodeLogRecord] = []
        self.yaw = initial_yaw
        self._start_time = start_time
        self._tick = 0
        self._goal: Optional[FloatArray] = None

    @property
    def cursor(self) -> float:
        return self.state.cursor

    @property
    def position(self) -> FloatArray:
        return self.state.trajectory.evaluate(self.state.cursor)

    @property
    def velocity(self) -> FloatArray:
        return self.state.trajectory.evaluate(self.state.cursor, 1)

    @property
    def trajectory(self) -> Trajectory:
        return self.state.trajectory

    def set_goal(self, goal: Sequence[float]) -> None:
        self.queue.clear()
        self.add_waypoint(goal)

    def add_waypoint(
        self, position: Sequence[float], tag: WaypointTag = WaypointTag.USER
    ) -> None:
        self.queue.add(position, tag, self.cursor)
        self._goal = np.asarray(position, dtype=np.float64)

    def follow_path(self, waypoints: Sequence[Sequence[float]]) -> None:
        """Track a global waypoint path, replacing the current queue."""
        self.queue.clear()
        self.queue.extend(waypoints, WaypointTag.GLOBAL_PLAN, self.cursor)
        if waypoints:
            self._goal = np.asarray(waypoints[-1], dtype=np.float64)

    def distance_to_goal(self) -> float:
        if self._goal is None:
            return 0.0
        return float(np.linalg.norm(self._goal - self.position))

    def verify(self, snapshot: DistanceSnapshot) -> Optional[float]:
        return verify_trajectory(
            self.state.trajectory,
            snapshot,
            self.config.robot_radius,
            self.config.verify_horizon,
            self.state.cursor,
            self.config.sample_dt,
        )

    def step(self, snapshot: DistanceSnapshot) -> ReplanOutcome:
        checker = CollisionChecker(snapshot, self.config.robot_radius)
        here = self.position

        def reachable(waypoint: FloatArray) -> bool:
            return checker.is_state_valid(waypoint) and checker.is_motion_valid(
                here, waypoint
            )

        self.queue.update(here, self.cursor, reachable)
        outcome = replan_step(self.state, snapshot, self.queue, self.config, self.rng)
        self.state.trajectory = outcome.trajectory
        self.log.append(
            EpisodeLogRecord(
                step=len(self.log),
                robot_state=self._robot_state(),
                action=outcome.action.value,
                suffix_duration_s=outcome.suffix_duration,
                distance_to_goal_m=self.distance_to_goal(),
            )
        )
        logger.debug(
            f"Step {len(self.log) - 1}: {outcome.action.value} "
            f"({outcome.suffix_duration:.2f} s suffix) {outcome.message}"
        )
        return outcome

    def advance(self, duration: float) -> TrajectorySamples:
        """Execute the active trajectory for ``duration`` seconds."""
        dt = self.config.sample_dt
        target = self.state.cursor + duration
        last_tick = int(math.floor((target - self._start_time) / dt + 1e-9))
        ticks = np.arange(self._tick + 1, last_tick + 1)
        times = self._start_time + dt * ticks
        trajectory = self.state.trajectory
        velocities = trajectory.evaluate_many(times, 1)
        samples = TrajectorySamples(
            times=times,
            positions=trajectory.evaluate_many(times, 0),
            velocities=velocities,
            accelerations=trajectory.evaluate_many(times, 2),
            yaws=yaw_profile(velocities, dt, self.yaw),
        )
        if len(ticks):
            self._tick = int(ticks[-1])
            self.yaw = float(samples.yaws[-1])
        self.state.cursor = target
        return samples

    def _robot_state(self) -> RobotStateDict:
        return {
            "time": self.cursor,
            "position": self.position.tolist(),
            "velocity": self.velocity.tolist(),
            "yaw": self.yaw,
        }

    def log_lines(self) -> List[str]:
        return [record.model_dump_json() for record in self.log]

"""Conservative replanning with a locked trajectory prefix.

Every update keeps the active trajectory unchanged up to the lock time
(cursor + lock horizon) and splices a new suffix that starts from the
exact locked state and ends at rest in observed free space.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from src.common.dto import (
    FittingMode,
    IntermediateStrategy,
    LocalPlannerConfig,
    LocoConfig,
)
from src.domain.exceptions import (
    IllConditionedTimesException,
    InvalidStartException,
    NoCandidatesException,
    PlanningFailedException,
    SmoothingFailedException,
)
from src.domain.local.intermediate_goals import (
    select_exploration_goal,
    select_random_intermediate_goal,
)
from src.domain.local.shotgun import shotgun_search
from src.domain.local.waypoint_queue import WaypointQueue
from src.domain.mapping.distance_snapshot import DistanceSnapshot
from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.collision import CollisionChecker
from src.domain.planning.paths import WaypointPath
from src.domain.planning.shortening import shorten_path
from src.domain.trajectory.audit import first_collision
from src.domain.trajectory.loco import loco_smooth
from src.domain.trajectory.polynomial import Trajectory
from src.domain.trajectory.spline_problem import fit_polynomial

logger = logging.getLogger()

_AT_REST = 1e-6


class ReplanAction(str, Enum):
    SMOOTH = "smooth"
    SHOTGUN = "shotgun"
    INTERMEDIATE = "intermediate"
    STOP = "stop"
    HOLD = "hold"


@dataclass
class ReplanState:
    trajectory: Trajectory
    cursor: float
    lock_horizon: float

    def locked_prefix(self) -> Trajectory:
        """Active trajectory up to cursor + lock horizon, held at rest past its end."""
        lock_time = self.cursor + self.lock_horizon
        active = self.trajectory
        if lock_time <= active.end_time:
            return active.truncated(lock_time)
        end = active.end_time
        hold = Trajectory.stationary(active.evaluate(end), lock_time - end, end)
        return active.appended(hold)


@dataclass
class ReplanOutcome:
    action: ReplanAction
    trajectory: Trajectory
    suffix_duration: float = 0.0
    message: str = ""


def verify_trajectory(
    trajectory: Trajectory,
    snapshot: DistanceSnapshot,
    robot_radius: float,
    horizon: float,
    cursor: Optional[float] = None,
    dt: float = 0.01,
) -> Optional[float]:
    """First time in [cursor, cursor + horizon] that is unknown or too close."""
    start = trajectory.start_time if cursor is None else cursor
    hit = first_collision(
        trajectory, snapshot, robot_radius, dt, start=start, end=start + horizon
    )
    return None if hit is None else hit.time


def stop_in_place(
    prefix: Trajectory,
    snapshot: DistanceSnapshot,
    config: LocalPlannerConfig,
) -> Optional[Trajectory]:
    """Brake from the locked state to rest along the current heading."""
    position, velocity, acceleration = prefix.state_at(prefix.end_time)
    speed = float(np.linalg.norm(velocity))
    if speed < _AT_REST and float(np.linalg.norm(acceleration)) < _AT_REST:
        return prefix
    duration = max(2.0 * speed / config.a_max, 0.2)
    end = position + 0.5 * duration * velocity
    try:
        braking = fit_polynomial(
            np.stack([position, end]),
            [duration],
            config.loco.derivative_order,
            start_state=np.stack([velocity, acceleration]),
            start_time=prefix.end_time,
        )
    except IllConditionedTimesException:
        return None
    hit = first_collision(braking, snapshot, config.robot_radius, config.sample_dt)
    if hit is not None:
        return None
    return prefix.appended(braking)


class _Attempt:
    """One replanning pass from a fixed locked state."""

    def __init__(
        self,
        prefix: Trajectory,
        snapshot: DistanceSnapshot,
        config: LocalPlannerConfig,
        rng: np.random.Generator,
    ) -> None:
        self.prefix = prefix
        self.snapshot = snapshot
        self.config = config
        self.rng = rng
        self.checker = CollisionChecker(snapshot, config.robot_radius)
        position, velocity, acceleration = prefix.state_at(prefix.end_time)
        self.position = position
        self.start_state = np.stack([velocity, acceleration])

    def _loco_config(self, mode: Optional[FittingMode] = None) -> LocoConfig:
        update: Dict[str, Any] = {
            "robot_radius": self.config.robot_radius,
            "v_max": self.config.v_max,
            "a_max": self.config.a_max,
        }
        if mode is not None:
            update["fitting_mode"] = mode
        return self.config.loco.model_copy(update=update)

    def _smooth(
        self, points: List[FloatArray], mode: Optional[FittingMode] = None
    ) -> Optional[Trajectory]:
        path = WaypointPath.from_points(points)
        if len(path) < 2:
            return None
        try:
            suffix = loco_smooth(
                path,
                self.snapshot,
                self._loco_config(mode),
                start_state=self.start_state,
                start_time=self.prefix.end_time,
            )
        except (SmoothingFailedException, IllConditionedTimesException) as error:
            logger.debug(f"Local smoothing failed: {error}")
            return None
        return suffix

    def visible_chain(self, waypoints: List[FloatArray]) -> List[FloatArray]:
        chain = [self.position]
        for waypoint in waypoints:
            if not self.checker.is_state_valid(waypoint):
                break
            if not self.checker.is_motion_valid(chain[-1], waypoint):
                break
            chain.append(waypoint)
        return chain

    def through_waypoints(self, waypoints: List[FloatArray]) -> Optional[Trajectory]:
        chain = self.visible_chain(waypoints)
        if len(chain) < 3:
            return None
        return self._smooth(chain, FittingMode.VISIBILITY_RESAMPLE)

    def _direct_target(self, target: FloatArray) -> Optional[FloatArray]:
        """Farthest point toward target reachable along the straight line."""
        offset = target - self.position
        length = float(np.linalg.norm(offset))
        if length == 0.0:
            return None
        count = max(1, int(np.ceil(length / (0.5 * self.snapshot.voxel_size))))
        samples = self.position + np.linspace(0.0, 1.0, count + 1)[:, None] * offset
        valid = self.checker.states_valid(samples)
        if not valid[0]:
            return None
        last = len(valid) - 1 if valid.all() else int(np.argmin(valid)) - 1
        return samples[last]  # type: ignore[no-any-return]

    def toward(self, target: FloatArray) -> Optional[Trajectory]:
        if not self.config.use_shotgun:
            endpoint = self._direct_target(target)
            if endpoint is None or self._negligible(endpoint):
                return None
            return self._smooth([self.position, endpoint])
        shotgun = self.config.shotgun.model_copy(
            update={"seed": int(self.rng.integers(2**31))}
        )
        try:
            found = shotgun_search(
                self.snapshot, self.position, target, shotgun, self.config.robot_radius
            )
        except InvalidStartException as error:
            logger.warning(f"Shotgun could not start: {error}")
            return None
        points = list(found.particle_path)
        if found.reached and self.checker.is_state_valid(target):
            if self.checker.is_motion_valid(points[-1], target):
                points.append(target)
        if self._negligible(points[-1]):
            return None
        if not self.config.use_shotgun_path:
            return self._smooth([self.position, points[-1]])
        try:
            shortened = shorten_path(self.checker, WaypointPath.from_points(points))
        except PlanningFailedException as error:
            logger.debug(f"Particle path could not be shortened: {error}")
            return None
        return self._smooth(list(shortened.waypoints))

    def _negligible(self, endpoint: FloatArray) -> bool:
        return bool(
            np.linalg.norm(endpoint - self.position) < self.snapshot.voxel_size
        )

    def intermediate_goal(self, target: FloatArray) -> Optional[FloatArray]:
        strategy = self.config.intermediate_strategy
        if strategy == IntermediateStrategy.RANDOM:
            return select_random_intermediate_goal(
                self.position, self.config.random_goal_radius, self.rng
            )
        if strategy == IntermediateStrategy.EXPLORATION:
            try:
                chosen = select_exploration_goal(
                    self.snapshot,
                    self.position,
                    target,
                    self.config.exploration,
                    self.config.camera,
                    self.config.robot_radius,
                    self.rng,
                )
            except NoCandidatesException as error:
                logger.debug(f"No exploration goal: {error}")
                return None
            return chosen.position
        return None


def replan_step(
    state: ReplanState,
    snapshot: DistanceSnapshot,
    queue: WaypointQueue,
    config: LocalPlannerConfig,
    rng: np.random.Generator,
) -> ReplanOutcome:
    """One pass of the decision cascade; never raises for planning failures.

    Order: smooth through visible upcoming waypoints, then shotgun (or a
    direct line) toward the next waypoint, then one intermediate goal, and
    finally stop in place.
    """
    prefix = state.locked_prefix()
    active_clear = (
        verify_trajectory(
            state.trajectory,
            snapshot,
            config.robot_radius,
            config.verify_horizon,
            state.cursor,
            config.sample_dt,
        )
        is None
    )
    following = queue.front()
    if following is None:
        if active_clear:
            return ReplanOutcome(ReplanAction.HOLD, state.trajectory)
    else:
        end = state.trajectory.evaluate(state.trajectory.end_time)
        reached = np.linalg.norm(end - following.position) <= queue.reach_tolerance
        if active_clear and reached:
            return ReplanOutcome(ReplanAction.HOLD, state.trajectory)

    attempt = _Attempt(prefix, snapshot, config, rng)
    if following is not None:
        suffix = attempt.through_waypoints(queue.upcoming())
        action = ReplanAction.SMOOTH
        if suffix is None:
            suffix = attempt.toward(following.position)
            action = ReplanAction.SHOTGUN if config.use_shotgun else ReplanAction.SMOOTH
        if suffix is None and not queue.has_intermediate():
            goal = attempt.intermediate_goal(following.position)
            if goal is not None:
                queue.insert_intermediate(goal, prefix.end_time)
                suffix = attempt.toward(goal)
                action = ReplanAction.INTERMEDIATE
                if suffix is None:
                    queue.discard_intermediates()
        if suffix is not None:
            return ReplanOutcome(action, prefix.appended(suffix), suffix.duration)

    stopped = stop_in_place(prefix, snapshot, config)
    if stopped is not None:
        return ReplanOutcome(
            ReplanAction.STOP,
            stopped,
            stopped.end_time - prefix.end_time,
            message="stop in place",
        )
    if active_clear:
        return ReplanOutcome(
            ReplanAction.STOP, state.trajectory, message="keep verified trajectory"
        )
    logger.warning("No collision-free stop found; keeping the active trajectory")
    return ReplanOutcome(ReplanAction.STOP, state.trajectory, message="no safe stop")

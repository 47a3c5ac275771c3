"""Soft-collision continuous optimisation of minimum-derivative splines.

The objective is a weighted sum of the spline derivative cost and a
collision cost over the free joint derivatives. The collision cost
integrates a smooth obstacle cost along the trajectory weighted by speed.
Both terms have analytic gradients.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from src.common.dto import FittingMode, LocoConfig
from src.domain.exceptions import SmoothingFailedException
from src.domain.mapping.voxel_core import FloatArray
from src.domain.planning.paths import WaypointPath
from src.domain.trajectory.audit import DistanceField, first_collision
from src.domain.trajectory.polynomial import Trajectory, derivative_basis
from src.domain.trajectory.spline_problem import (
    N_COEFFICIENTS,
    SplineProblem,
    allocate_segment_times,
    boundary_values,
    endpoint_fixed_mask,
    fit_polynomial,
)
from src.domain.trajectory.velocity_ramp import velocity_ramp

logger = logging.getLogger()


def obstacle_cost(
    clearance: FloatArray, epsilon: float
) -> Tuple[FloatArray, FloatArray]:
    """Cost and slope of the clearance-shell penalty.

    Linear inside obstacles, quadratic inside the epsilon shell and zero
    beyond it; value and slope are continuous at both joins.
    """
    e = np.asarray(clearance, dtype=np.float64)
    cost = np.zeros_like(e)
    slope = np.zeros_like(e)
    inside = e < 0
    shell = (e >= 0) & (e <= epsilon)
    cost[inside] = -e[inside] + 0.5 * epsilon
    slope[inside] = -1.0
    cost[shell] = (e[shell] - epsilon) ** 2 / (2.0 * epsilon)
    slope[shell] = (e[shell] - epsilon) / epsilon
    return cost, slope


@dataclass
class CollisionSamples:
    """Linear maps from stacked joint derivatives to sampled states.

    Samples sit at the midpoints of ``ceil(T / dt)`` equal sub-steps of every
    segment; ``weights`` holds the sub-step lengths.
    """

    positions: FloatArray
    velocities: FloatArray
    weights: FloatArray

    @classmethod
    def build(cls, problem: SplineProblem, dt: float) -> "CollisionSamples":
        position_rows: List[FloatArray] = []
        velocity_rows: List[FloatArray] = []
        weights: List[FloatArray] = []
        for duration, segment_map in zip(problem.segment_times, problem.maps):
            count = max(1, int(math.ceil(duration / dt - 1e-9)))
            tau = (np.arange(count) + 0.5) / count
            position_rows.append(
                derivative_basis(tau, N_COEFFICIENTS, 0) @ segment_map
            )
            velocity_rows.append(
                derivative_basis(tau, N_COEFFICIENTS, 1) @ segment_map / duration
            )
            weights.append(np.full(count, duration / count))
        return cls(
            np.vstack(position_rows), np.vstack(velocity_rows), np.concatenate(weights)
        )


def loco_collision_cost(
    derivatives: FloatArray,
    samples: CollisionSamples,
    field: DistanceField,
    config: LocoConfig,
) -> Tuple[float, FloatArray]:
    """Collision cost and its gradient with respect to every stacked joint derivative.

    Samples with unknown distance are charged as if they sat epsilon inside
    an obstacle, a constant ``1.5 * epsilon`` per metre travelled. Their
    spatial gradient is zero: the optimizer is not pushed out of unknown
    space, only towards shorter arcs through it. Trajectories that still
    cross unknown space are rejected by the collision audit.
    """
    positions = samples.positions @ derivatives
    velocities = samples.velocities @ derivatives
    values, gradients = field.interpolate_many(positions)
    unknown = np.isnan(values)
    clearance = np.where(unknown, -config.epsilon, values - config.robot_radius)
    cost, slope = obstacle_cost(clearance, config.epsilon)
    slope[unknown] = 0.0
    gradients = np.where(unknown[:, None], 0.0, gradients)

    speeds = np.linalg.norm(velocities, axis=1)
    total = float(np.sum(cost * speeds * samples.weights))
    position_grad = (slope * speeds * samples.weights)[:, None] * gradients
    safe_speeds = np.where(speeds > 0, speeds, 1.0)
    velocity_grad = (
        (cost * samples.weights / safe_speeds)[:, None]
        * velocities
        * (speeds > 0)[:, None]
    )
    gradient = (
        samples.positions.T @ position_grad + samples.velocities.T @ velocity_grad
    )
    return total, gradient


class LocoObjective:
    def __init__(
        self,
        problem: SplineProblem,
        fixed_mask: npt.NDArray[np.bool_],
        fixed_values: FloatArray,
        field: DistanceField,
        config: LocoConfig,
    ) -> None:
        self.problem = problem
        self.field = field
        self.config = config
        self.base = problem.solve(fixed_mask, fixed_values)
        self.samples = CollisionSamples.build(problem, config.dt)

    @property
    def initial_free(self) -> FloatArray:
        return self.base.free_values().copy()

    def derivatives(self, free_values: FloatArray) -> FloatArray:
        d = self.base.derivatives.copy()
        d[self.base.free] = free_values
        return d

    def collision_cost(self, free_values: FloatArray) -> float:
        cost, _ = loco_collision_cost(
            self.derivatives(free_values), self.samples, self.field, self.config
        )
        return cost

    def evaluate(self, free_values: FloatArray) -> Tuple[float, FloatArray]:
        d = self.derivatives(free_values)
        smoothness = self.problem.cost(d)
        collision, collision_grad = loco_collision_cost(
            d, self.samples, self.field, self.config
        )
        r = self.problem.cost_matrix
        smoothness_grad = 2.0 * (r @ d)[self.base.free]
        config = self.config
        value = (
            config.derivative_weight * smoothness + config.collision_weight * collision
        )
        gradient = (
            self.config.derivative_weight * smoothness_grad
            + self.config.collision_weight * collision_grad[self.base.free]
        )
        return value, gradient


@dataclass
class LocoResult:
    trajectory: Trajectory
    iterations: int
    initial_collision_cost: float
    final_collision_cost: float
    history: List[float]


def minimize(
    objective: LocoObjective, free_values: Optional[FloatArray] = None
) -> Tuple[FloatArray, List[float]]:
    """Steepest descent with Armijo backtracking; the step doubles on success.

    Returns the final free derivatives and the objective after every
    accepted step.
    """
    config = objective.config
    x = objective.initial_free if free_values is None else free_values
    value, gradient = objective.evaluate(x)
    history = [value]
    step = config.initial_step
    for iteration in range(1, config.max_iterations + 1):
        norm_sq = float(np.sum(gradient * gradient))
        if math.sqrt(norm_sq) < config.tolerance:
            break
        for _ in range(config.max_backtracks):
            candidate = x - step * gradient
            candidate_value, candidate_gradient = objective.evaluate(candidate)
            if candidate_value <= value - config.armijo_c * step * norm_sq:
                break
            step *= 0.5
        else:
            logger.debug(f"Line search stalled after {iteration} iterations")
            break
        x, value, gradient = candidate, candidate_value, candidate_gradient
        history.append(value)
        step *= 2.0
    return x, history


def _resample(
    points: FloatArray, config: LocoConfig, start_state: Optional[FloatArray]
) -> FloatArray:
    if config.fitting_mode == FittingMode.POLYNOMIAL_RESAMPLE:
        times = allocate_segment_times(points, config.v_max, config.a_max)
        guide = fit_polynomial(
            points, times, config.derivative_order, start_state=start_state
        )
    else:
        guide = velocity_ramp(
            WaypointPath.from_points(points), config.v_max, config.a_max
        )
    sample_times = np.linspace(guide.start_time, guide.end_time, config.segments + 1)
    return guide.evaluate_many(sample_times)


class LocoSmoother:
    def __init__(self, field: DistanceField, config: LocoConfig) -> None:
        self.field = field
        self.config = config

    def objective(
        self,
        path: WaypointPath,
        start_state: Optional[FloatArray] = None,
    ) -> LocoObjective:
        """Initial spline per fitting mode, wrapped as an optimisation problem."""
        config = self.config
        points = np.asarray(path.waypoints, dtype=np.float64)
        if len(points) < 2:
            raise SmoothingFailedException("loco needs at least two waypoints")
        if config.fitting_mode == FittingMode.WAYPOINT_FIT:
            times = allocate_segment_times(points, config.v_max, config.a_max)
            problem = SplineProblem(times, config.derivative_order)
            values = boundary_values(problem, points, start_state)
            return LocoObjective(
                problem, endpoint_fixed_mask(problem), values, self.field, config
            )

        anchors = _resample(points, config, start_state)
        total = sum(allocate_segment_times(points, config.v_max, config.a_max))
        times = [total / config.segments] * config.segments
        problem = SplineProblem(times, config.derivative_order)
        values = boundary_values(problem, anchors, start_state)
        guess = problem.solve(endpoint_fixed_mask(problem, True), values)
        return LocoObjective(
            problem,
            endpoint_fixed_mask(problem, pin_interior_positions=False),
            guess.derivatives,
            self.field,
            config,
        )

    def optimize(
        self,
        path: WaypointPath,
        start_state: Optional[FloatArray] = None,
        start_time: float = 0.0,
    ) -> LocoResult:
        objective = self.objective(path, start_state)
        initial = objective.initial_free
        if objective.base.free.size == 0:
            free, history = initial, [objective.evaluate(initial)[0]]
        else:
            free, history = minimize(objective, initial)
        return LocoResult(
            trajectory=objective.problem.to_trajectory(
                objective.derivatives(free), start_time
            ),
            iterations=len(history) - 1,
            initial_collision_cost=objective.collision_cost(initial),
            final_collision_cost=objective.collision_cost(free),
            history=history,
        )

    def smooth(
        self,
        path: WaypointPath,
        start_state: Optional[FloatArray] = None,
        start_time: float = 0.0,
    ) -> Trajectory:
        result = self.optimize(path, start_state, start_time)
        config = self.config
        hit = first_collision(
            result.trajectory, self.field, config.robot_radius, config.audit_dt
        )
        if hit is not None:
            raise SmoothingFailedException(
                f"optimised trajectory in collision at t={hit.time:.3f}s "
                f"after {result.iterations} iterations"
            )
        logger.debug(
            f"Loco converged in {result.iterations} iterations, "
            f"collision cost {result.initial_collision_cost:.4f} -> "
            f"{result.final_collision_cost:.4f}"
        )
        return result.trajectory


def loco_smooth(
    path: WaypointPath,
    field: DistanceField,
    config: LocoConfig,
    start_state: Optional[FloatArray] = None,
    start_time: float = 0.0,
) -> Trajectory:
    return LocoSmoother(field, config).smooth(path, start_state, start_time)

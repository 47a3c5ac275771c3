"""Closed-form minimum-derivative splines over joint derivatives.

Every joint carries ``DERIVATIVES`` derivatives (position through snap) per
dimension. Segments are degree-9 polynomials parameterised internally in
normalised time so long segments stay well conditioned.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from src.domain.exceptions import IllConditionedTimesException
from src.domain.mapping.voxel_core import FloatArray
from src.domain.trajectory.polynomial import (
    PolynomialSegment,
    Trajectory,
    derivative_basis,
)

logger = logging.getLogger()

DERIVATIVES = 5
N_COEFFICIENTS = 2 * DERIVATIVES
MAX_CONDITION = 1e15

IntArray = npt.NDArray[np.int64]


def _unit_mapping() -> FloatArray:
    """End-derivative rows at tau = 0 and tau = 1 for [1, tau, ..., tau^9]."""
    rows = [
        derivative_basis(np.array([tau]), N_COEFFICIENTS, r)[0]
        for tau in (0.0, 1.0)
        for r in range(DERIVATIVES)
    ]
    return np.array(rows)


def _unit_cost(order: int) -> FloatArray:
    cost = np.zeros((N_COEFFICIENTS, N_COEFFICIENTS))
    for j in range(order, N_COEFFICIENTS):
        for k in range(order, N_COEFFICIENTS):
            fj = math.factorial(j) / math.factorial(j - order)
            fk = math.factorial(k) / math.factorial(k - order)
            cost[j, k] = fj * fk / (j + k - 2 * order + 1)
    return cost


_UNIT_MAPPING_INV = np.linalg.inv(_unit_mapping())


@dataclass
class SplineSolution:
    derivatives: FloatArray
    fixed: IntArray
    free: IntArray
    r_free: FloatArray
    r_fixed_free: FloatArray

    def free_values(self) -> FloatArray:
        return self.derivatives[self.free]  # type: ignore[no-any-return]

    def fixed_values(self) -> FloatArray:
        return self.derivatives[self.fixed]  # type: ignore[no-any-return]


class SplineProblem:
    """Quadratic derivative cost sum_k d_k^T H d_k over stacked joint derivatives."""

    def __init__(
        self, segment_times: Sequence[float], derivative_order: int = 4
    ) -> None:
        times = np.asarray(segment_times, dtype=np.float64)
        if len(times) == 0 or np.any(~np.isfinite(times)) or np.any(times <= 0):
            raise IllConditionedTimesException("segment times must be positive")
        self.segment_times = times
        self.derivative_order = derivative_order
        self.n_segments = len(times)
        self.size = DERIVATIVES * (self.n_segments + 1)
        unit_cost = _unit_cost(derivative_order)

        self.maps: List[FloatArray] = []
        self.cost_matrix = np.zeros((self.size, self.size))
        for i, duration in enumerate(times):
            scale = np.diag(
                np.tile([duration**r for r in range(DERIVATIVES)], 2)
            )
            selection = np.zeros((N_COEFFICIENTS, self.size))
            start = DERIVATIVES * i
            selection[:, start : start + N_COEFFICIENTS] = np.eye(N_COEFFICIENTS)
            segment_map = _UNIT_MAPPING_INV @ scale @ selection
            self.maps.append(segment_map)
            weight = duration ** (1 - 2 * derivative_order)
            self.cost_matrix += weight * segment_map.T @ unit_cost @ segment_map

    def index(self, joint: int, order: int) -> int:
        return DERIVATIVES * joint + order

    def cost(self, derivatives: FloatArray) -> float:
        d = np.asarray(derivatives, dtype=np.float64).reshape(self.size, -1)
        return float(np.einsum("ik,ij,jk->", d, self.cost_matrix, d))

    def partition(
        self,
        fixed_mask: npt.NDArray[np.bool_],
        free_permutation: Optional[Sequence[int]] = None,
    ) -> Tuple[IntArray, IntArray, FloatArray, FloatArray]:
        fixed = np.flatnonzero(fixed_mask)
        free = np.flatnonzero(~np.asarray(fixed_mask, dtype=bool))
        if free_permutation is not None:
            free = free[np.asarray(free_permutation, dtype=np.int64)]
        r_free = self.cost_matrix[np.ix_(free, free)]
        r_fixed_free = self.cost_matrix[np.ix_(fixed, free)]
        return fixed, free, r_free, r_fixed_free

    def solve(
        self,
        fixed_mask: npt.NDArray[np.bool_],
        fixed_values: FloatArray,
        free_permutation: Optional[Sequence[int]] = None,
    ) -> SplineSolution:
        """Optimal free derivatives -r_free^-1 r_fixed_free^T fixed, per dimension."""
        values = np.asarray(fixed_values, dtype=np.float64).reshape(self.size, -1)
        fixed, free, r_free, r_fixed_free = self.partition(fixed_mask, free_permutation)
        derivatives = values.copy()
        if len(free):
            condition = np.linalg.cond(r_free)
            if not np.isfinite(condition) or condition > MAX_CONDITION:
                raise IllConditionedTimesException(
                    f"free-block condition number {condition:.3e} for times "
                    f"{self.segment_times.tolist()}"
                )
            try:
                free_values = -np.linalg.solve(r_free, r_fixed_free.T @ values[fixed])
            except np.linalg.LinAlgError as error:
                raise IllConditionedTimesException(str(error)) from error
            if not np.all(np.isfinite(free_values)):
                raise IllConditionedTimesException("non-finite free derivatives")
            derivatives[free] = free_values
        return SplineSolution(derivatives, fixed, free, r_free, r_fixed_free)

    def free_gradient(self, solution: SplineSolution) -> FloatArray:
        """Derivative-cost gradient over the free derivatives at the solution."""
        d = solution.derivatives
        gradient: FloatArray = 2.0 * (
            solution.r_free @ d[solution.free]
            + solution.r_fixed_free.T @ d[solution.fixed]
        )
        return gradient

    def normalized_coefficients(self, derivatives: FloatArray) -> List[FloatArray]:
        d = np.asarray(derivatives, dtype=np.float64).reshape(self.size, -1)
        return [segment_map @ d for segment_map in self.maps]

    def to_trajectory(
        self, derivatives: FloatArray, start_time: float = 0.0
    ) -> Trajectory:
        segments = []
        for duration, normalized in zip(
            self.segment_times, self.normalized_coefficients(derivatives)
        ):
            powers = float(duration) ** np.arange(N_COEFFICIENTS)
            coefficients = (normalized / powers[:, None]).T
            segments.append(PolynomialSegment(coefficients, float(duration)))
        return Trajectory(segments, start_time)


def endpoint_fixed_mask(
    problem: SplineProblem, pin_interior_positions: bool = True
) -> npt.NDArray[np.bool_]:
    mask = np.zeros(problem.size, dtype=bool)
    last = problem.n_segments
    for order in range(3):
        mask[problem.index(0, order)] = True
        mask[problem.index(last, order)] = True
    if pin_interior_positions:
        for joint in range(1, last):
            mask[problem.index(joint, 0)] = True
    return mask


def boundary_values(
    problem: SplineProblem,
    waypoints: FloatArray,
    start_state: Optional[FloatArray] = None,
    end_state: Optional[FloatArray] = None,
) -> FloatArray:
    """Stacked derivative values with positions at joints and end states.

    ``start_state``/``end_state`` hold [velocity, acceleration] rows; zero
    when omitted.
    """
    points = np.asarray(waypoints, dtype=np.float64)
    values = np.zeros((problem.size, points.shape[1]))
    for joint, point in enumerate(points):
        values[problem.index(joint, 0)] = point
    last = problem.n_segments
    for state, joint in ((start_state, 0), (end_state, last)):
        if state is not None:
            state = np.asarray(state, dtype=np.float64).reshape(2, -1)
            values[problem.index(joint, 1)] = state[0]
            values[problem.index(joint, 2)] = state[1]
    return values


def fit_polynomial(
    waypoints: FloatArray,
    segment_times: Sequence[float],
    derivative_order: int = 4,
    start_state: Optional[FloatArray] = None,
    end_state: Optional[FloatArray] = None,
    start_time: float = 0.0,
    free_permutation: Optional[Sequence[int]] = None,
) -> Trajectory:
    points = np.asarray(waypoints, dtype=np.float64)
    if len(points) != len(segment_times) + 1:
        raise ValueError("need one more waypoint than segment times")
    problem = SplineProblem(segment_times, derivative_order)
    solution = problem.solve(
        endpoint_fixed_mask(problem),
        boundary_values(problem, points, start_state, end_state),
        free_permutation,
    )
    return problem.to_trajectory(solution.derivatives, start_time)


def ramp_duration(length: float, v_max: float, a_max: float) -> float:
    """Trapezoidal time when v_max is reachable, triangular otherwise."""
    if length <= 0:
        return 0.0
    if length >= v_max * v_max / a_max:
        return v_max / a_max + length / v_max
    return 2.0 * math.sqrt(length / a_max)


def allocate_segment_times(
    waypoints: FloatArray, v_max: float, a_max: float, minimum: float = 0.05
) -> List[float]:
    points = np.asarray(waypoints, dtype=np.float64)
    lengths = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return [
        max(ramp_duration(float(length), v_max, a_max), minimum) for length in lengths
    ]

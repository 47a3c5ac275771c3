from typing import Optional, Sequence

import pytest

from src.adapters.planners.prm_adapter import PrmPlannerAdapter
from src.adapters.planners.straight_line_adapter import StraightLinePlannerAdapter
from src.domain.planning.paths import PlanningBudget, PlanResult, WaypointPath
from src.ports.global_planner_port import GlobalPlannerPort


class EchoPlanner(GlobalPlannerPort):
    name = "echo"

    def plan(
        self,
        start: Sequence[float],
        goal: Sequence[float],
        budget: PlanningBudget,
        seed: Optional[int] = None,
    ) -> PlanResult:
        return PlanResult(True, WaypointPath.from_points([start, goal]))


class TestGlobalPlannerPort:
    def test_abstract_class_cannot_be_instantiated(self) -> None:
        with pytest.raises(TypeError):
            GlobalPlannerPort()  # type: ignore[abstract]

    def test_abstract_method_raises_not_implemented_error(self) -> None:
        class IncompletePlanner(GlobalPlannerPort):
            def plan(
                self,
                start: Sequence[float],
                goal: Sequence[float],
                budget: PlanningBudget,
                seed: Optional[int] = None,
            ) -> PlanResult:
                return super().plan(start, goal, budget, seed)

        with pytest.raises(NotImplementedError):
            IncompletePlanner().plan((0, 0, 0), (1, 0, 0), PlanningBudget())

    def test_concrete_implementation(self) -> None:
        result = EchoPlanner().plan((0, 0, 0), (3, 4, 0), PlanningBudget())
        assert result.success
        assert result.length == pytest.approx(5.0)

    @pytest.mark.parametrize(
        "adapter", [StraightLinePlannerAdapter, PrmPlannerAdapter]
    )
    def test_adapters_implement_the_port(self, adapter: type) -> None:
        assert issubclass(adapter, GlobalPlannerPort)
        assert adapter.name

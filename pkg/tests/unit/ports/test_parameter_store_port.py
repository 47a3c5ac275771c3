from typing import Optional

import pytest

from src.adapters.exceptions import ParameterNotFoundException
from src.ports.parameter_store_port import ParameterStorePort


class DictParameterStore(ParameterStorePort):
    def __init__(self, values: dict) -> None:  # type: ignore[type-arg]
        self.values = values

    def get_parameter(self, name: str) -> Optional[str]:
        try:
            return str(self.values[name])
        except KeyError:
            raise ParameterNotFoundException(f"Parameter not found: {name}")


class TestParameterStorePort:

    def test_abstract_class_cannot_be_instantiated(self) -> None:
        with pytest.raises(TypeError):
            ParameterStorePort()  # type: ignore[abstract]

    def test_abstract_method_raises_not_implemented_error(self) -> None:
        class IncompleteStore(ParameterStorePort):
            def get_parameter(self, name: str) -> Optional[str]:
                return super().get_parameter(name)

        incomplete_store = IncompleteStore()
        with pytest.raises(NotImplementedError):
            incomplete_store.get_parameter("LAYER_VOXEL_SIZE")

    @pytest.mark.parametrize(
        "name, expected",
        [
            ("LAYER_VOXEL_SIZE", "0.1"),
            ("PLANNER_ROBOT_RADIUS", "0.5"),
        ],
    )
    def test_concrete_implementation(self, name: str, expected: str) -> None:
        store = DictParameterStore(
            {"LAYER_VOXEL_SIZE": 0.1, "PLANNER_ROBOT_RADIUS": 0.5}
        )
        assert store.get_parameter(name) == expected

    def test_missing_parameter(self) -> None:
        store = DictParameterStore({})
        with pytest.raises(ParameterNotFoundException):
            store.get_parameter("LAYER_VOXEL_SIZE")

from unittest.mock import MagicMock, patch

import pytest

from src.adapters.exceptions import ModuleNotFoundException
from src.utils.module import Module, Modules


class TestModules:

    @patch("src.utils.module.importlib.import_module")
    @patch("src.utils.module.getattr")
    def test_get_class_instance_success(
        self,
        mock_getattr: MagicMock,
        mock_import_module: MagicMock,
    ) -> None:
        # Arrange
        mock_class_instance = MagicMock()
        mock_getattr.return_value = mock_class_instance
        mock_import_module.return_value = MagicMock()

        # Act
        result = Modules.get_class_instance(
            "some.path", "SomeClass", "arg1", kwarg1="value1"
        )

        # Assert
        mock_import_module.assert_called_once_with("some.path")
        mock_getattr.assert_called_once_with(
            mock_import_module.return_value, "SomeClass"
        )
        mock_class_instance.assert_called_once_with("arg1", kwarg1="value1")
        assert result == mock_class_instance.return_value

    @patch("src.utils.module.importlib.import_module")
    @patch("src.utils.module.logger")
    def test_get_class_instance_import_error(
        self,
        mock_logger: MagicMock,
        mock_import_module: MagicMock,
    ) -> None:
        # Arrange
        mock_import_module.side_effect = ImportError("import error")

        # Act & Assert
        with pytest.raises(ModuleNotFoundException, match="some.invalid.path"):
            Modules.get_class_instance("some.invalid.path", "InvalidClass")
        mock_logger.error.assert_called_once_with("Error: import error")

    def test_get_class_instance_missing_class(self) -> None:
        # Act & Assert
        with pytest.raises(ModuleNotFoundException):
            Modules.get_class_instance("src.utils.module", "NoSuchClass")


class TestModulesDefaultInstance:

    @patch("src.utils.module.Modules.get_class_instance")
    @patch("src.utils.module.Resource.load_json")
    def test_get_class_default_instance(
        self, mock_load_json: MagicMock, mock_get_class_instance: MagicMock
    ) -> None:
        # Arrange
        mock_load_json.return_value = {
            "defaults": {"path": "some.path", "class_name": "SomeClass"},
            "environment": {"path": "other.path", "class_name": "OtherClass"},
        }
        mock_instance = MagicMock()
        mock_get_class_instance.return_value = mock_instance

        # Act
        result = Modules.get_class_default_instance(
            Module.DEFAULTS_PARAMETER_STORE.value, "arg1", kwarg1="value1"
        )

        # Assert
        mock_load_json.assert_called_once_with("modules.json")
        mock_get_class_instance.assert_called_once_with(
            "some.path", "SomeClass", "arg1", kwarg1="value1"
        )
        assert result == mock_instance

    @patch("src.utils.module.Resource.load_json")
    def test_get_class_default_instance_unknown(
        self, mock_load_json: MagicMock
    ) -> None:
        # Arrange
        mock_load_json.return_value = {}

        # Act & Assert
        with pytest.raises(ModuleNotFoundException, match="planner.astar"):
            Modules.get_class_default_instance("planner.astar")


class TestRegisteredModules:

    def test_every_module_is_registered(self) -> None:
        # Act
        planners = Modules.names("planner")
        smoothers = Modules.names("smoother")

        # Assert
        assert sorted(planners) == [
            "none",
            "prm",
            "rrt_connect",
            "rrt_star",
            "skeleton",
        ]
        assert sorted(smoothers) == ["loco", "none", "poly", "ramp"]

    @pytest.mark.parametrize("module", list(Module))
    def test_registered_classes_import(self, module: Module) -> None:
        # Arrange
        from src.utils.resources import Resource

        entry = Resource.load_json("modules.json")[module.value]

        # Act
        imported = __import__(entry["path"], fromlist=[entry["class_name"]])

        # Assert
        assert hasattr(imported, entry["class_name"])

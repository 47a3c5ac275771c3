import json
import os
from unittest.mock import MagicMock, mock_open, patch

import pytest

from src.utils.resources import RESOURCES_PATH, Resource


class TestResourceLoadJson:

    @patch("src.utils.resources.os.path.isfile")
    def test_load_json_file_not_found(self, mock_isfile: MagicMock) -> None:
        # Arrange
        mock_isfile.return_value = False

        # Act & Assert
        with pytest.raises(FileNotFoundError):
            Resource.load_json("nonexistent.json")

    @patch("src.utils.resources.os.path.isfile")
    @patch("src.utils.resources.json.load")
    def test_load_json_success(
        self,
        mock_json_load: MagicMock,
        mock_isfile: MagicMock,
    ) -> None:
        # Arrange
        mock_isfile.return_value = True
        mock_json_load.return_value = {"key": "value"}
        mock_open_instance = mock_open(read_data='{"key": "value"}')
        expected_path = os.path.join(RESOURCES_PATH, "test.json")

        with patch("builtins.open", mock_open_instance):
            # Act
            result = Resource.load_json("test.json")

        # Assert
        mock_isfile.assert_called_once_with(expected_path)
        mock_open_instance.assert_called_once_with(
            expected_path, "r", encoding="utf-8"
        )
        mock_json_load.assert_called_once_with(mock_open_instance())
        assert result == {"key": "value"}

    @patch("src.utils.resources.os.path.isfile")
    @patch("src.utils.resources.json.load")
    @patch("src.utils.resources.logger")
    def test_load_json_json_decode_error(
        self,
        mock_logger: MagicMock,
        mock_json_load: MagicMock,
        mock_isfile: MagicMock,
    ) -> None:
        # Arrange
        mock_isfile.return_value = True
        mock_json_load.side_effect = json.JSONDecodeError(
            "Expecting value", "doc", 0
        )
        mock_open_instance = mock_open(read_data="invalid json")

        with patch("builtins.open", mock_open_instance):
            # Act & Assert
            with pytest.raises(ValueError):
                Resource.load_json("test.json")
            mock_logger.error.assert_called_once_with(
                "Error: Expecting value: line 1 column 1 (char 0)"
            )

    def test_resources_path_is_independent_of_cwd(self) -> None:
        # Act
        path = Resource.path("modules.json")

        # Assert
        assert os.path.isabs(path)
        assert os.path.isfile(path)

    def test_bundled_resources_load(self) -> None:
        # Act
        logger_config = Resource.load_json("logger.json")
        parameters = Resource.load_json("parameters.json")

        # Assert
        assert logger_config["version"] == 1
        assert set(parameters) == {"defaults", "environment"}


class TestResourceLoadJsonFile:

    def test_load_json_file(self, tmp_path: "os.PathLike[str]") -> None:
        # Arrange
        path = os.path.join(tmp_path, "overlay.json")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write('{"LAYER_VOXEL_SIZE": 0.2}')

        # Act
        result = Resource.load_json_file(path)

        # Assert
        assert result == {"LAYER_VOXEL_SIZE": 0.2}

    def test_load_json_file_decode_error(
        self, tmp_path: "os.PathLike[str]"
    ) -> None:
        # Arrange
        path = os.path.join(tmp_path, "broken.json")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("{")

        # Act & Assert
        with pytest.raises(ValueError, match="Error decoding JSON"):
            Resource.load_json_file(path)

import json
import logging
import os
from typing import Any

logger = logging.getLogger()

RESOURCES_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "resources"
)


class Resource:
    @staticmethod
    def path(name: str) -> str:
        return os.path.join(RESOURCES_PATH, name)

    @staticmethod
    def load_json(path: str) -> Any:
        absolute_path = Resource.path(path)
        if not os.path.isfile(absolute_path):
            raise FileNotFoundError(
                f"The file {absolute_path} does not exist."
            )

        with open(absolute_path, "r", encoding="utf-8") as file:
            try:
                return json.load(file)
            except json.JSONDecodeError as error:
                logger.error(f"Error: {error}")
                raise ValueError(
                    f"Error decoding JSON from file {absolute_path}: {error}"
                )

    @staticmethod
    def load_json_file(path: str) -> Any:
        """JSON from an arbitrary file, e.g. a user parameter overlay."""
        with open(path, "r", encoding="utf-8") as file:
            try:
                return json.load(file)
            except json.JSONDecodeError as error:
                logger.error(f"Error: {error}")
                raise ValueError(f"Error decoding JSON from file {path}: {error}")

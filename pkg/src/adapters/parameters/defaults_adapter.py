import logging
import os
from typing import Dict, Optional

from src.adapters.exceptions import ParameterNotFoundException, ParameterStoreException
from src.ports.parameter_store_port import ParameterStorePort
from src.utils.resources import Resource
from src.utils.singleton import SingletonHashABC

logger = logging.getLogger()

OVERLAY_VARIABLE = "VXP_PARAMETERS_FILE"


class DefaultsParameterStoreAdapter(ParameterStorePort, metaclass=SingletonHashABC):
    """Bundled parameter values, optionally overlaid by a JSON file.

    The overlay is a flat object of parameter names to values, named by
    the ``VXP_PARAMETERS_FILE`` environment variable.
    """

    def __init__(self, parameter_map: Optional[Dict[str, str]] = None) -> None:
        self.__values: Dict[str, str] = dict(parameter_map or {})
        overlay = os.getenv(OVERLAY_VARIABLE)
        if overlay:
            self.__values.update(self.__load_overlay(overlay))
        logger.info(
            f"Initialized defaults parameter store with {len(self.__values)} values"
        )

    @staticmethod
    def __load_overlay(path: str) -> Dict[str, str]:
        try:
            content = Resource.load_json_file(path)
        except (OSError, ValueError) as error:
            logger.error(f"Cannot read parameter overlay {path}: {error}")
            raise ParameterStoreException(f"Invalid parameter overlay {path}")
        if not isinstance(content, dict):
            raise ParameterStoreException("Parameter overlay must be a JSON object")
        return {str(key): str(value) for key, value in content.items()}

    def get_parameter(self, name: str) -> Optional[str]:
        try:
            return self.__values[name]
        except KeyError:
            raise ParameterNotFoundException(f"Parameter not found: {name}")

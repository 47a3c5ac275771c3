import logging
import os
from typing import Dict, Optional

from src.adapters.exceptions import ParameterNotFoundException
from src.ports.parameter_store_port import ParameterStorePort
from src.utils.singleton import SingletonHashABC

logger = logging.getLogger()


class EnvironmentParameterStoreAdapter(
    ParameterStorePort, metaclass=SingletonHashABC
):
    """Parameters from environment variables.

    Mapped names read the mapped variable; unmapped names read
    ``<prefix><NAME>``.
    """

    def __init__(
        self,
        parameter_map: Optional[Dict[str, str]] = None,
        prefix: str = "VXP_",
    ) -> None:
        self.__parameter_map = parameter_map or {}
        self.__prefix = prefix
        logger.info("Initialized environment parameter store")

    def get_parameter(self, name: str) -> Optional[str]:
        variable = self.__parameter_map.get(name, f"{self.__prefix}{name}")
        value = os.getenv(variable)
        if value is None or value == "":
            raise ParameterNotFoundException(f"Parameter not found: {name}")
        return value

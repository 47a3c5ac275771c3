from abc import ABC, abstractmethod
from typing import Optional


class ParameterStorePort(ABC):
    """Named string parameters; missing names raise ParameterNotFoundException."""

    @abstractmethod
    def get_parameter(self, name: str) -> Optional[str]:
        raise NotImplementedError

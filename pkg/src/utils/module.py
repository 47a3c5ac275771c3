import importlib
import logging
from enum import Enum
from typing import Any, Dict, List

from typing_extensions import TypedDict

from src.adapters.exceptions import ModuleNotFoundException
from src.utils.resources import Resource

logger = logging.getLogger()


class ImportModule(TypedDict):
    path: str
    class_name: str


class Module(Enum):
    DEFAULTS_PARAMETER_STORE = "defaults"
    ENVIRONMENT_PARAMETER_STORE = "environment"
    PLANNER_NONE = "planner.none"
    PLANNER_RRT_CONNECT = "planner.rrt_connect"
    PLANNER_RRT_STAR = "planner.rrt_star"
    PLANNER_PRM = "planner.prm"
    PLANNER_SKELETON = "planner.skeleton"
    SMOOTHER_NONE = "smoother.none"
    SMOOTHER_RAMP = "smoother.ramp"
    SMOOTHER_POLY = "smoother.poly"
    SMOOTHER_LOCO = "smoother.loco"


class Modules:
    @staticmethod
    def get_class_instance(
        path: str,
        class_name: str,
        *args: Any,
        **kwargs: Any,
    ) -> Any:
        try:
            module = getattr(
                importlib.import_module(path),
                class_name,
            )
        except (ImportError, AttributeError) as error:
            logger.error(f"Error: {error}")
            raise ModuleNotFoundException(f"Cannot load {path}.{class_name}")
        return module(*args, **kwargs)

    @classmethod
    def get_class_default_instance(
        cls,
        module: str,
        *args: Any,
        **kwargs: Any,
    ) -> Any:
        modules: Dict[str, ImportModule] = Resource.load_json("modules.json")
        if module not in modules:
            raise ModuleNotFoundException(f"Unknown module {module!r}")
        import_module: ImportModule = modules[module]
        return cls.get_class_instance(
            import_module["path"], import_module["class_name"], *args, **kwargs
        )

    @staticmethod
    def names(group: str) -> List[str]:
        """Registered names under a dotted group, e.g. ``planner``."""
        modules: Dict[str, ImportModule] = Resource.load_json("modules.json")
        prefix = f"{group}."
        return [name[len(prefix) :] for name in modules if name.startswith(prefix)]

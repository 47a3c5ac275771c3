import logging
import logging.config
import os
from typing import Any, Dict, Optional, Type, TypeVar, cast

from pydantic import BaseModel

from src.adapters.exceptions import ParameterNotFoundException
from src.ports.parameter_store_port import ParameterStorePort
from src.utils.module import Module, Modules
from src.utils.resources import Resource
from src.utils.singleton import Singleton

logger = logging.getLogger()

ModelT = TypeVar("ModelT", bound=BaseModel)


class Config(metaclass=Singleton):
    VERSION = "0.1.0"
    ENVIRONMENT = os.getenv("ENVIRONMENT")
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    PARAMETER_STORE_MODULE = os.getenv(
        "PARAMETER_STORE_MODULE", Module.DEFAULTS_PARAMETER_STORE.value
    )

    def __init__(self) -> None:
        self._configure_logging()
        self._parameter_store_adapter = self._load_parameter_store()

    def _configure_logging(self) -> None:
        logger_config = Resource.load_json("logger.json")
        logging.config.dictConfig(logger_config)
        logging.getLogger().setLevel(getattr(logging, self.LOG_LEVEL))

    def set_log_level(self, level: str) -> None:
        logging.getLogger().setLevel(getattr(logging, level.upper()))

    def _load_parameter_store(
        self, module_name: Optional[str] = None
    ) -> ParameterStorePort:
        module = self.PARAMETER_STORE_MODULE
        if module_name:
            module = module_name

        parameters = Resource.load_json("parameters.json")
        parameter_map = parameters[module]
        return cast(
            ParameterStorePort,
            Modules.get_class_default_instance(
                module, parameter_map=parameter_map
            ),
        )

    def get_parameter(
        self, name: str, module_name: Optional[str] = None
    ) -> Optional[str]:
        parameter_store = self._parameter_store_adapter
        if module_name:
            parameter_store = self._load_parameter_store(module_name)
        return parameter_store.get_parameter(name)

    def settings(
        self,
        model: Type[ModelT],
        prefix: str,
        **overrides: Any,
    ) -> ModelT:
        """Model defaults, overlaid by ``<PREFIX>_<FIELD>`` parameters.

        Explicit keyword overrides win over stored parameters. Only scalar
        fields are looked up; nested models keep their defaults unless
        overridden.
        """
        values: Dict[str, Any] = {}
        for field_name, field in model.model_fields.items():
            annotation = field.annotation
            if isinstance(annotation, type) and issubclass(annotation, BaseModel):
                continue
            name = f"{prefix}_{field_name}".upper()
            try:
                value = self.get_parameter(name)
            except ParameterNotFoundException:
                continue
            if value is not None:
                values[field_name] = value
        values.update(overrides)
        return model.model_validate(values)


class LocalConfig(Config):
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")


class TestConfig(Config):
    LOG_LEVEL = "DEBUG"
    PARAMETER_STORE_MODULE = Module.DEFAULTS_PARAMETER_STORE.value


class DevelopmentConfig(Config):
    pass


class StagingConfig(Config):
    pass


class ProductionConfig(Config):
    LOG_LEVEL = "WARNING"


def config_factory(environment: str) -> Config:
    configs = {
        "local": LocalConfig,
        "test": TestConfig,
        "development": DevelopmentConfig,
        "staging": StagingConfig,
        "production": ProductionConfig,
    }
    config_class = configs[environment]
    return config_class()


def get_config() -> Config:
    environment = os.getenv("ENVIRONMENT", "local")
    app_config = config_factory(environment)

    return app_config

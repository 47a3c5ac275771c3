import hashlib
from abc import ABCMeta
from typing import Any, Dict


def generate_hash(value: str) -> str:
    return hashlib.sha256(value.encode("utf-8")).hexdigest()


class Singleton(type):
    """One instance per class, e.g. the process configuration."""

    _instances: Dict[type, Any] = {}

    def __call__(cls, *args: Any, **kwargs: Any) -> Any:
        if cls not in cls._instances:
            cls._instances[cls] = super().__call__(*args, **kwargs)
        return cls._instances[cls]

    @staticmethod
    def drop() -> None:
        Singleton._instances = {}


class SingletonHash(type):
    """One instance per class and constructor arguments."""

    _instances: Dict[str, Any] = {}

    def __call__(cls, *args: Any, **kwargs: Any) -> Any:
        key = generate_hash(f"{cls.__qualname__}:{args!r}:{sorted(kwargs.items())!r}")
        if key not in cls._instances:
            cls._instances[key] = super().__call__(*args, **kwargs)
        return cls._instances[key]

    @staticmethod
    def drop() -> None:
        SingletonHash._instances = {}


class SingletonHashABC(SingletonHash, ABCMeta):
    pass

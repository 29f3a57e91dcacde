"""Continuous-variable entanglement distribution over fading satellite links."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    DomainError,
    NotEntangledError,
    NumericalError,
    SchemeKind,
)

__all__ = [name for name in dir() if not name.startswith("_")]

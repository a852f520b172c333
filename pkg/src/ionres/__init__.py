"""Conduction resonances in periodically driven dissipative site chains."""

from .kernel import backend_name
from .model import (
    BathSpec,
    ChainSpec,
    DriveSpec,
    IntegratorSpec,
    SimulationSpec,
    ValidationError,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "BathSpec",
    "ChainSpec",
    "DriveSpec",
    "IntegratorSpec",
    "SimulationSpec",
    "ValidationError",
    "validate",
    "backend_name",
    "__version__",
]

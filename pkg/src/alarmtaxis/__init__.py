"""Simulation and analysis of a three-species prey, predator and alarm-taxis system."""

from .errors import (
    AlarmTaxisError,
    BlowUpError,
    ConfigError,
    DomainError,
    NumericalFailure,
    PositivityViolation,
)
from .grid import Domain
from .model import ModelParams
from .stepper import SimState, StepControl, run

__all__ = [
    "AlarmTaxisError", "BlowUpError", "ConfigError", "DomainError", "NumericalFailure",
    "PositivityViolation", "Domain", "ModelParams", "SimState", "StepControl", "run",
]
__version__ = "0.1.0"

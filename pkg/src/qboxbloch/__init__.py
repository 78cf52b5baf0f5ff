"""Bloch equations for electrons in quantum boxes.

Operator algebra and generator derivation, the one-species, degenerate,
two-species, electron-hole and reduced models, field profiles, fixed-step
integrators, physicality diagnostics and a config-driven CLI.
"""

from .fields import FieldProfile, Gaussian, Pulse, Rectangular, constant_field
from .integrators import StepperSpec, Trajectory, simulate
from .models import OneSpeciesSystem, TwoSpeciesSystem, ValidationError

__version__ = "0.1.0"

__all__ = [
    "FieldProfile", "Gaussian", "Pulse", "Rectangular", "constant_field",
    "StepperSpec", "Trajectory", "simulate",
    "OneSpeciesSystem", "TwoSpeciesSystem", "ValidationError",
]

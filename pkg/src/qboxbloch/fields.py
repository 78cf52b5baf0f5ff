"""External field profiles E(t).

A profile is a sum of pulses ``amplitude * envelope(t) * exp(-i (w t + phase))``.
Envelopes are peak-normalised, so an amplitude reads directly as the peak
field strength.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Constant:
    def __call__(self, t: float) -> float:
        return 1.0


@dataclass(frozen=True)
class Gaussian:
    center: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"gaussian width must be positive, got {self.width}")

    def __call__(self, t: float) -> float:
        x = (t - self.center) / self.width
        return float(np.exp(-0.5 * x * x))


@dataclass(frozen=True)
class Rectangular:
    """Unit on ``[start, stop)``, zero elsewhere."""

    start: float
    stop: float

    def __post_init__(self):
        if not self.start < self.stop:
            raise ValueError(f"rectangular envelope needs start < stop, got {self.start}, {self.stop}")

    def __call__(self, t: float) -> float:
        return 1.0 if self.start <= t < self.stop else 0.0


Envelope = Union[Constant, Gaussian, Rectangular]


@dataclass(frozen=True)
class Pulse:
    amplitude: tuple
    carrier_frequency: float = 0.0
    phase: float = 0.0
    envelope: Envelope = field(default_factory=Constant)

    def __post_init__(self):
        amp = np.asarray(self.amplitude, dtype=complex).reshape(-1)
        if amp.size != 3:
            raise ValueError(f"pulse amplitude must be a 3-vector, got {amp.size} components")
        object.__setattr__(self, "amplitude", tuple(complex(a) for a in amp))

    def __call__(self, t: float) -> np.ndarray:
        weight = self.envelope(t) * np.exp(-1j * (self.carrier_frequency * t + self.phase))
        return np.asarray(self.amplitude) * weight


@dataclass(frozen=True)
class FieldProfile:
    pulses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))

    def __call__(self, t: float) -> np.ndarray:
        return evaluate(self, t)


def evaluate(profile: FieldProfile, t: float) -> np.ndarray:
    out = np.zeros(3, dtype=complex)
    for pulse in profile.pulses:
        out += pulse(t)
    return out


def constant_field(amplitude, carrier_frequency: float = 0.0, phase: float = 0.0) -> FieldProfile:
    return FieldProfile((Pulse(amplitude, carrier_frequency, phase),))

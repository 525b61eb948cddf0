"""Note parameter mapping: direction to pitch, importance to loudness.

The frequency map is log-linear over the angle range so equal angle steps
sound as equal musical intervals; straight-up segments hit f_max, straight
-down segments hit f_min, and horizontal segments land on the geometric
mean of the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import CurveSample

DEFAULT_F_MIN = 110.0  # A2
DEFAULT_F_MAX = 880.0  # A5


@dataclass(frozen=True)
class MappingConfig:
    f_min: float = DEFAULT_F_MIN
    f_max: float = DEFAULT_F_MAX
    attack: float = 0.002
    decay_base: float = 0.8
    decay_min: float = 0.06
    amp_floor: float = 0.0

    def __post_init__(self):
        if not (0 < self.f_min < self.f_max):
            raise ValueError(f"need 0 < f_min < f_max, got {self.f_min}..{self.f_max}")
        if not (0 < self.decay_min <= self.decay_base):
            raise ValueError(
                f"need 0 < decay_min <= decay_base, got {self.decay_min}/{self.decay_base}"
            )
        if not self.attack > 0:
            raise ValueError("attack must be > 0")
        if not (0.0 <= self.amp_floor < 1.0):
            raise ValueError("amp_floor must be in [0, 1)")

    def validate_for_sample_rate(self, sample_rate: float) -> None:
        if self.f_max >= sample_rate / 2:
            raise ValueError(f"f_max {self.f_max} at or above Nyquist of {sample_rate}")


@dataclass(frozen=True)
class Note:
    frequency: float
    amplitude: float
    decay: float
    line_id: int
    onset: float  # seconds, session clock


def angle_to_frequency(theta: float, cfg: MappingConfig = MappingConfig()) -> float:
    """Map a direction angle in [-pi/2, +pi/2] to Hz, log-linearly."""
    half = math.pi / 2
    if not -half <= theta <= half:
        raise ValueError(f"angle {theta} outside [-pi/2, +pi/2]")
    return cfg.f_min * (cfg.f_max / cfg.f_min) ** ((theta + half) / math.pi)


def importance_to_amplitude(beta: float, cfg: MappingConfig = MappingConfig()) -> float:
    """Map beta in [0, 1] to linear gain; amp_floor keeps faint lines audible."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta {beta} outside [0, 1]")
    return cfg.amp_floor + (1.0 - cfg.amp_floor) * beta


def make_note(sample: CurveSample, onset: float, cfg: MappingConfig = MappingConfig()) -> Note:
    """Note for a plucked curve sample; decay starts at the configured base
    and is rescaled dynamically by the mixer at spawn time."""
    return Note(
        frequency=angle_to_frequency(sample.angle, cfg),
        amplitude=importance_to_amplitude(sample.beta, cfg),
        decay=cfg.decay_base,
        line_id=sample.line_id,
        onset=onset,
    )

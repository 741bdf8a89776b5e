"""Pulseman models."""

from pulseman.models.scheme import LevelScheme
from pulseman.models.sweep import SweepResult, SweepRun, SweepStatus

__all__ = [
    "LevelScheme",
    "SweepResult",
    "SweepRun",
    "SweepStatus",
]

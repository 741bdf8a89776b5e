"""Pulseman admin."""

from pulseman.admin.scheme import LevelSchemeAdmin
from pulseman.admin.sweep import SweepResultInline, SweepRunAdmin

__all__ = [
    "LevelSchemeAdmin",
    "SweepResultInline",
    "SweepRunAdmin",
]

"""Pulseman adapters."""

from pulseman.adapters.dop853 import Dop853Propagator
from pulseman.adapters.effective import EffectivePropagator

__all__ = [
    "Dop853Propagator",
    "EffectivePropagator",
]

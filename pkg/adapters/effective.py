"""
RWA-only ExactPropagator.

Answers the double check with the time-independent effective model instead
of integrating the full Hamiltonian. Useful to isolate optimizer problems
from RWA breakdown; never use it to confirm a pulse.

Usage in settings.py:
    PULSEMAN = {
        "PROPAGATOR_BACKEND": "pulseman.adapters.effective.EffectivePropagator",
    }
"""

from __future__ import annotations

import threading

from pulseman import dynamics, rwa
from pulseman.exceptions import ControlError
from pulseman.protocols.dynamics import Frame, PropagationResult, StateVector
from pulseman.protocols.propagator import ExactPropagator
from pulseman.protocols.system import DriveSet, LevelSystem


class EffectivePropagator:
    """ExactPropagator that evolves with exp(-i G T) in the rotating frame."""

    def propagate(
        self,
        system: LevelSystem,
        drives: DriveSet,
        psi0: StateVector,
        duration: float,
        tol: float = dynamics.DEFAULT_TOL,
        stop: threading.Event | None = None,
    ) -> PropagationResult:
        if stop is not None and stop.is_set():
            raise ControlError("CANCELLED")
        generator = rwa.effective_model(system, drives)
        b0 = dynamics.frame_transform(psi0, Frame.B, system, generator.gamma)
        b = dynamics.propagate_effective(generator, b0, duration)
        psi = dynamics.frame_transform(b, Frame.LAB, system, generator.gamma)
        return PropagationResult(
            state=psi,
            duration=duration,
            norm_drift=abs(psi.norm - psi0.norm),
            method="effective",
        )


# Verify protocol compliance at import time.
if not isinstance(EffectivePropagator(), ExactPropagator):
    raise TypeError("EffectivePropagator does not implement ExactPropagator protocol")

"""
ExactPropagator protocol.

Lets projects plug their own integrator into the double check without
pulseman importing it.

Usage:
    # In settings.py
    PULSEMAN = {
        "PROPAGATOR_BACKEND": "myproject.integrators.MagnusPropagator",
    }
"""

from __future__ import annotations

import threading
from typing import Protocol, runtime_checkable

from pulseman.protocols.dynamics import PropagationResult, StateVector
from pulseman.protocols.system import DriveSet, LevelSystem


@runtime_checkable
class ExactPropagator(Protocol):
    """
    Interface for propagating a lab-frame state under the full drive Hamiltonian.

    Implementations integrate i d(psi)/dt = [H_D + sum_f Re(A_f exp(-i w_f t)) H_C] psi
    from t=0 to `duration` and return the lab-frame state at `duration`.
    """

    def propagate(
        self,
        system: LevelSystem,
        drives: DriveSet,
        psi0: StateVector,
        duration: float,
        tol: float = 1e-12,
        stop: threading.Event | None = None,
    ) -> PropagationResult:
        """
        Args:
            system: Drift spectrum and couplings
            drives: Constant fields with their amplitudes set
            psi0: Normalized lab-frame state at t=0
            duration: Final time, inverse energy units
            tol: Local error target per step
            stop: Optional cancellation token, checked between steps

        Returns:
            PropagationResult whose state is in the lab frame at `duration`.
        """
        ...

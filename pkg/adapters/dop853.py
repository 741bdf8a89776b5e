"""
Default ExactPropagator: explicit Runge-Kutta 8(5,3) in the interaction frame.

Usage in settings.py:
    PULSEMAN = {
        "PROPAGATOR_BACKEND": "pulseman.adapters.dop853.Dop853Propagator",
        "TRAJECTORY_DIR": "/tmp/pulseman-trajectories",  # optional CSV dumps
    }

This is what get_propagator() returns when PROPAGATOR_BACKEND is unset.
"""

from __future__ import annotations

import itertools
import logging
import threading
from pathlib import Path

from pulseman import dynamics
from pulseman.protocols.dynamics import PropagationResult, StateVector
from pulseman.protocols.propagator import ExactPropagator
from pulseman.protocols.system import DriveSet, LevelSystem

logger = logging.getLogger(__name__)

_counter = itertools.count()


class Dop853Propagator:
    """
    ExactPropagator backed by scipy's DOP853 stepper.

    When TRAJECTORY_DIR is configured, every propagation also writes its
    accepted steps to `<TRAJECTORY_DIR>/trajectory-<n>.csv`.
    """

    def propagate(
        self,
        system: LevelSystem,
        drives: DriveSet,
        psi0: StateVector,
        duration: float,
        tol: float = dynamics.DEFAULT_TOL,
        stop: threading.Event | None = None,
    ) -> PropagationResult:
        return dynamics.propagate_exact(
            system, drives, psi0, duration, tol=tol, stop=stop, trajectory=self._trajectory_path()
        )

    def _trajectory_path(self) -> Path | None:
        from pulseman.conf import pulseman_settings

        directory = pulseman_settings.TRAJECTORY_DIR
        if not directory:
            return None
        path = Path(directory) / f"trajectory-{next(_counter):05d}.csv"
        logger.debug("Dumping exact trajectory to %s", path)
        return path


# Verify protocol compliance at import time.
if not isinstance(Dop853Propagator(), ExactPropagator):
    raise TypeError("Dop853Propagator does not implement ExactPropagator protocol")

"""State and propagation protocols."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from pulseman.exceptions import ControlError


class Frame(StrEnum):
    """Coefficient frame of a state vector.

    - lab: psi_k, the Schroedinger-picture amplitudes
    - c: interaction frame, c_k = exp(i E_k t) psi_k
    - b: rotating frame, b_k = exp(i gamma_k t) c_k
    """

    LAB = "lab"
    C = "c"
    B = "b"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes tagged with the frame they live in and the time they refer to."""

    amplitudes: np.ndarray
    frame: Frame = Frame.C
    time: float = 0.0

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "frame", Frame(self.frame))
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def basis(cls, dimension: int, index: int, frame: Frame = Frame.C, time: float = 0.0) -> StateVector:
        amplitudes = np.zeros(dimension, dtype=complex)
        amplitudes[index] = 1.0
        return cls(amplitudes, frame, time)

    @classmethod
    def normalized(cls, amplitudes, frame: Frame = Frame.C, time: float = 0.0) -> StateVector:
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise ControlError("INVALID_PAYLOAD", message="Cannot normalize the zero vector")
        return cls(amplitudes / norm, frame, time)

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def at(self, time: float) -> StateVector:
        """Same amplitudes relabelled with another time stamp."""
        return StateVector(self.amplitudes, self.frame, time)

    def __repr__(self) -> str:
        return f"StateVector(frame={self.frame.value}, time={self.time:g}, amplitudes={self.amplitudes!r})"


@dataclass(frozen=True)
class PropagationResult:
    """
    Final state of a propagation plus integrator statistics.

    `steps` and `evaluations` are zero for the closed-form effective path.
    `norm_drift` is | ||psi(T)|| - ||psi(0)|| |, never corrected.
    """

    state: StateVector
    duration: float
    steps: int = 0
    evaluations: int = 0
    norm_drift: float = 0.0
    method: str = "effective"

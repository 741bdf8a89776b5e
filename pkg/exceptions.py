"""Pulseman exceptions."""

from __future__ import annotations

from typing import Any


class ControlError(Exception):
    """
    Structured exception for control operations.

    Usage:
        try:
            gamma = assign_gamma(graph, detunings)
        except ControlError as e:
            if e.code == "CYCLIC_GRAPH":
                print(f"Cycle through {e.data['cycle']}")
    """

    _default_messages = {
        "INVALID_SYSTEM": "Level system violates its invariants",
        "CYCLIC_GRAPH": "Level graph has a cycle",
        "DISCONNECTED_GRAPH": "Level graph is not connected",
        "NO_RESONANT_TRANSITION": "Drive frequency is not resonant with any coupled transition",
        "AMBIGUOUS_RESONANCE": "Drive frequency is resonant with more than one transition",
        "DUPLICATE_DRIVE": "Two drive fields are resonant with the same transition",
        "UNASSIGNED_EDGE": "Coupled transition has no drive field",
        "NONVANISHING_RESIDUALS": "Gamma assignment leaves nonzero edge residuals",
        "NON_HERMITIAN_GENERATOR": "Generator is not Hermitian",
        "STEP_SIZE_UNDERFLOW": "Integrator step size underflow",
        "INTEGRATION_FAILED": "Integrator failed",
        "CANCELLED": "Propagation cancelled",
        "FRAME_MISMATCH": "States are in different frames or at different times",
        "UNREACHABLE": "Goal state is not reachable with the given drive",
        "INCONSISTENT_GOAL": "Goal state cannot be met under the equal-detuning constraint",
        "OBJECTIVE_NON_FINITE": "Objective returned a non-finite value",
        "RESAMPLE_EXHAUSTED": "Could not draw a spectrum satisfying the gap constraint",
        "INVALID_CONFIG": "Invalid configuration",
        "INVALID_PAYLOAD": "Invalid JSON payload",
    }

    def __init__(self, code: str, message: str | None = None, **data: Any):
        self.code = code
        self.message = message or self._default_messages.get(code, code)
        self.data = data
        super().__init__(f"[{code}] {self.message}")

    def as_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "data": self.data}

    @property
    def edge(self) -> tuple[int, int] | None:
        return self.data.get("edge")

    @property
    def field(self) -> int | None:
        return self.data.get("field")

    @property
    def max_theta(self) -> float | None:
        return self.data.get("max_theta")

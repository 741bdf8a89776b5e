"""Control problem and solution protocols."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any

import numpy as np

from pulseman.exceptions import ControlError
from pulseman.protocols.dynamics import Frame, StateVector
from pulseman.protocols.system import DriveField, DriveSet, LevelSystem


@dataclass(frozen=True)
class TwoLevelGoal:
    """Bloch angles of the goal (cos(theta/2), exp(i phi) sin(theta/2))."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ControlError("INVALID_CONFIG", message="theta must lie in [0, pi]", theta=self.theta)
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))

    def vector(self) -> np.ndarray:
        return np.array(
            [math.cos(self.theta / 2), complex(math.cos(self.phi), math.sin(self.phi)) * math.sin(self.theta / 2)],
            dtype=complex,
        )


@dataclass(frozen=True)
class StarGoal:
    """
    Star goal: moduli xi (center first) and leaf phases beta_1..beta_{N-1}.

    The center phase beta_0 is fixed to 0 by the choice of global phase.
    """

    xi: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        xi = tuple(float(x) for x in self.xi)
        beta = tuple(float(b) for b in self.beta)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "beta", beta)
        if len(xi) < 2:
            raise ControlError("INVALID_CONFIG", message="A star goal needs at least two levels")
        if len(beta) != len(xi) - 1:
            raise ControlError("INVALID_CONFIG", message="Need one phase per leaf")
        if any(x < 0 for x in xi):
            raise ControlError("INVALID_CONFIG", message="Moduli must be nonnegative")
        if abs(sum(x * x for x in xi) - 1.0) > 1e-12:
            raise ControlError("INVALID_CONFIG", message="Moduli must be normalized")

    @property
    def dimension(self) -> int:
        return len(self.xi)

    def vector(self) -> np.ndarray:
        phases = np.concatenate([[0.0], np.asarray(self.beta)])
        return np.asarray(self.xi) * np.exp(1j * phases)


@dataclass(frozen=True)
class ControlSolution:
    """Closed-form answer: effective amplitudes, phases, duration and Rabi scale."""

    amplitudes: tuple[float, ...]
    phases: tuple[float, ...]
    duration: float
    rabi: float
    reachable: bool = True

    @property
    def complex_amplitudes(self) -> tuple[complex, ...]:
        return tuple(a * complex(math.cos(p), math.sin(p)) for a, p in zip(self.amplitudes, self.phases))


@dataclass(frozen=True)
class SimplexConfig:
    """
    Nelder-Mead settings.

    `scale` holds per-coordinate initial simplex steps; when empty the
    caller supplies them. `target` stops the search early once reached.
    """

    scale: tuple[float, ...] = ()
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_evaluations: int = 50_000
    xtol: float = 1e-10
    ftol: float = 1e-14
    restarts: int = 20
    target: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "scale", tuple(float(s) for s in self.scale))
        for name in ("reflection", "expansion", "contraction", "shrink", "xtol", "ftol"):
            if not getattr(self, name) > 0:
                raise ControlError("INVALID_CONFIG", message=f"{name} must be positive", key=name)
        if not self.expansion > self.reflection:
            raise ControlError("INVALID_CONFIG", message="expansion must exceed reflection", key="expansion")
        if not self.contraction < 1 or not self.shrink < 1:
            raise ControlError("INVALID_CONFIG", message="contraction and shrink must be below 1")
        if self.max_evaluations < 1 or self.restarts < 0:
            raise ControlError("INVALID_CONFIG", message="max_evaluations >= 1 and restarts >= 0 required")

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> SimplexConfig:
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ControlError("INVALID_CONFIG", message=f"Unknown simplex keys: {sorted(unknown)}")
        if "scale" in data:
            data["scale"] = tuple(data["scale"])
        return cls(**data)

    def evolve(self, **changes) -> SimplexConfig:
        return replace(self, **changes)


@dataclass(frozen=True)
class SimplexResult:
    """Best point found by the simplex search and its bookkeeping."""

    x: np.ndarray = field(compare=False)
    fun: float
    evaluations: int
    iterations: int
    restarts: int
    converged: bool


@dataclass(frozen=True, eq=False)
class TransferProblem:
    """
    State-to-state transfer on a tree with fixed drive frequencies.

    `initial` and `goal` are c-frame vectors (initial at t=0, goal at t=T).
    `amplitude_bound` caps every |A_f|; None means unbounded.
    """

    system: LevelSystem
    drives: DriveSet
    initial: StateVector
    goal: StateVector
    threshold: float = 1e-3
    amplitude_bound: float | None = None

    def __post_init__(self):
        n = self.system.dimension
        for name in ("initial", "goal"):
            state = getattr(self, name)
            if state.dimension != n:
                raise ControlError("INVALID_CONFIG", message=f"{name} state has wrong dimension")
            if state.frame is not Frame.C:
                raise ControlError("FRAME_MISMATCH", message=f"{name} state must be a c-frame vector")
            if not state.is_normalized():
                raise ControlError("INVALID_CONFIG", message=f"{name} state is not normalized")
        if not self.threshold > 0:
            raise ControlError("INVALID_CONFIG", message="threshold must be positive")
        if self.amplitude_bound is not None and not self.amplitude_bound > 0:
            raise ControlError("INVALID_CONFIG", message="amplitude_bound must be positive")

    @classmethod
    def from_detuning(cls, system: LevelSystem, detuning: float, goal, initial=None, **kwargs) -> TransferProblem:
        """Drive every edge at omega = E_upper - E_lower - detuning."""
        assignment = tuple(system.upper_lower(edge) for edge in system.edges)
        fields_ = tuple(DriveField(0j, system.transition(*pair) - detuning) for pair in assignment)
        drives = DriveSet(fields_, assignment)
        if initial is None:
            initial = StateVector.basis(system.dimension, 0)
        if not isinstance(goal, StateVector):
            goal = StateVector(goal)
        if not isinstance(initial, StateVector):
            initial = StateVector(initial)
        return cls(system, drives, initial, goal, **kwargs)

    @property
    def frequencies(self) -> tuple[float, ...]:
        return self.drives.frequencies

    @property
    def field_count(self) -> int:
        return len(self.drives.fields)


@dataclass(frozen=True)
class TransferSolution:
    """
    Optimized (or closed-form) pulse parameters with achieved infidelities.

    `exact_infidelity` stays None until the exact double check has run.
    """

    amplitudes: tuple[float, ...]
    phases: tuple[float, ...]
    duration: float
    rwa_infidelity: float
    threshold: float = 1e-3
    exact_infidelity: float | None = None
    evaluations: int = 0
    seed: int | None = None
    method: str = "nelder-mead"
    exact_steps: int = 0
    norm_drift: float | None = None

    @property
    def field_count(self) -> int:
        return len(self.amplitudes)

    @property
    def parameter_count(self) -> int:
        return 2 * self.field_count + 1

    @property
    def complex_amplitudes(self) -> tuple[complex, ...]:
        return tuple(a * complex(math.cos(p), math.sin(p)) for a, p in zip(self.amplitudes, self.phases))

    @property
    def rwa_success(self) -> bool:
        return self.rwa_infidelity < self.threshold

    @property
    def exact_success(self) -> bool | None:
        if self.exact_infidelity is None:
            return None
        return self.exact_infidelity < self.threshold

    def evolve(self, **changes) -> TransferSolution:
        return replace(self, **changes)

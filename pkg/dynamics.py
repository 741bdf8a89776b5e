"""
State propagation.

Two propagators live here:

- `propagate_effective` exponentiates the time-independent RWA generator
  through a Hermitian eigendecomposition, so it is exact up to rounding.
- `propagate_exact` integrates the full drive Hamiltonian with an adaptive
  8th order Runge-Kutta scheme (DOP853). It works in the interaction frame,
  where free evolution is trivial, and returns lab-frame states.

Frames: psi (lab), c_k = exp(i E_k t) psi_k, b_k = exp(i gamma_k t) c_k.
"""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.integrate import DOP853

from pulseman.exceptions import ControlError
from pulseman.protocols.dynamics import Frame, PropagationResult, StateVector
from pulseman.protocols.system import DriveSet, EffectiveGenerator, GammaAssignment, LevelSystem

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
TIME_TOL = 1e-9


# =============================================================================
# FRAMES AND METRICS
# =============================================================================


def _gamma_values(gamma) -> np.ndarray:
    if isinstance(gamma, GammaAssignment):
        gamma = gamma.gamma
    return np.asarray(gamma, dtype=float)


def frame_transform(
    state: StateVector,
    target: Frame | str,
    system: LevelSystem | None = None,
    gamma: GammaAssignment | Sequence[float] | None = None,
) -> StateVector:
    """
    Move a state between the lab, c and b frames at its own time stamp.

    Lab <-> c needs `system` (energies); c <-> b needs `gamma`.
    """
    target = Frame(target)
    if state.frame is target:
        return state

    t = state.time
    amplitudes = state.amplitudes

    def phases(values, sign):
        return np.exp(sign * 1j * np.asarray(values, dtype=float) * t)

    def need(value, name):
        if value is None:
            raise ControlError("INVALID_CONFIG", message=f"{name} is required for this frame change")
        return value

    # Go through the c frame.
    if state.frame is Frame.LAB:
        c = amplitudes * phases(need(system, "system").energies, +1)
    elif state.frame is Frame.B:
        c = amplitudes * phases(_gamma_values(need(gamma, "gamma")), -1)
    else:
        c = amplitudes

    if target is Frame.LAB:
        out = c * phases(need(system, "system").energies, -1)
    elif target is Frame.B:
        out = c * phases(_gamma_values(need(gamma, "gamma")), +1)
    else:
        out = c
    return StateVector(out, target, t)


def _same_time(a: float, b: float) -> bool:
    return abs(a - b) <= TIME_TOL * max(1.0, abs(a), abs(b))


def vector_infidelity(goal: np.ndarray, reached: np.ndarray) -> float:
    """1 - |<goal|reached>|^2 on raw amplitude arrays, clipped to [0, 1]."""
    overlap = np.vdot(goal, reached)
    return float(min(1.0, max(0.0, 1.0 - (overlap.real**2 + overlap.imag**2))))


def infidelity(goal: StateVector, reached: StateVector) -> float:
    """
    Global-phase invariant infidelity between two states.

    Raises:
        ControlError: FRAME_MISMATCH if frames or time stamps differ.
    """
    if goal.frame is not reached.frame or not _same_time(goal.time, reached.time):
        raise ControlError(
            "FRAME_MISMATCH",
            goal=(goal.frame.value, goal.time),
            reached=(reached.frame.value, reached.time),
        )
    if goal.dimension != reached.dimension:
        raise ControlError("FRAME_MISMATCH", message="States have different dimensions")
    return vector_infidelity(goal.amplitudes, reached.amplitudes)


def hilbert_distance(goal: StateVector, start: StateVector) -> float:
    """Euclidean distance between amplitude vectors; not phase invariant."""
    if goal.frame is not start.frame:
        raise ControlError("FRAME_MISMATCH", goal=goal.frame.value, start=start.frame.value)
    return float(np.linalg.norm(goal.amplitudes - start.amplitudes))


# =============================================================================
# EFFECTIVE (TIME-INDEPENDENT) PROPAGATION
# =============================================================================


def _eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    matrix = np.asarray(matrix, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > 1e-12 * scale:
        raise ControlError("NON_HERMITIAN_GENERATOR")
    return linalg.eigh(matrix)


def evolution_operator(matrix: np.ndarray, duration: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H via V exp(-i lambda t) V^dagger."""
    energies, vectors = _eigh(matrix)
    return (vectors * np.exp(-1j * energies * duration)) @ vectors.conj().T


def propagate_effective(generator: EffectiveGenerator | np.ndarray, b0: StateVector, duration: float) -> StateVector:
    """
    Evolve rotating-frame coefficients: b(T) = exp(-i G T) b(0).

    Raises:
        ControlError: FRAME_MISMATCH unless b0 is a b-frame state,
            NON_HERMITIAN_GENERATOR if G is not Hermitian.
    """
    if b0.frame is not Frame.B:
        raise ControlError("FRAME_MISMATCH", message="Effective propagation acts on b-frame states")
    matrix = generator.matrix if isinstance(generator, EffectiveGenerator) else generator
    if duration == 0:
        return b0
    u = evolution_operator(matrix, duration)
    return StateVector(u @ b0.amplitudes, Frame.B, b0.time + duration)


def propagate_effective_trajectory(
    generator: EffectiveGenerator | np.ndarray, b0: StateVector, times: Sequence[float]
) -> list[StateVector]:
    """States at each time offset in `times`, sharing one eigendecomposition."""
    if b0.frame is not Frame.B:
        raise ControlError("FRAME_MISMATCH", message="Effective propagation acts on b-frame states")
    matrix = generator.matrix if isinstance(generator, EffectiveGenerator) else generator
    energies, vectors = _eigh(matrix)
    projected = vectors.conj().T @ b0.amplitudes
    return [
        StateVector(vectors @ (np.exp(-1j * energies * t) * projected), Frame.B, b0.time + t) for t in times
    ]


# =============================================================================
# EXACT PROPAGATION
# =============================================================================


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    duration: float,
    tol: float = DEFAULT_TOL,
    max_step: float = np.inf,
    stop: threading.Event | None = None,
    record: bool = False,
) -> tuple[np.ndarray, int, int, list[tuple[float, np.ndarray]]]:
    """
    Step DOP853 from 0 to `duration`, checking `stop` between steps.

    Returns (y(duration), steps, rhs evaluations, recorded samples).
    """
    if not tol > 0:
        raise ControlError("INVALID_CONFIG", message="tol must be positive", tol=tol)
    solver = DOP853(rhs, 0.0, np.asarray(y0, dtype=complex), duration, rtol=tol, atol=tol, max_step=max_step)
    samples: list[tuple[float, np.ndarray]] = [(0.0, solver.y.copy())] if record else []
    steps = 0
    while solver.status == "running":
        if stop is not None and stop.is_set():
            raise ControlError("CANCELLED", time=solver.t, steps=steps)
        message = solver.step()
        steps += 1
        if solver.status == "failed":
            code = "STEP_SIZE_UNDERFLOW" if message and "step size" in message else "INTEGRATION_FAILED"
            raise ControlError(code, message=message, time=solver.t, steps=steps)
        if record:
            samples.append((solver.t, solver.y.copy()))
    return solver.y, steps, solver.nfev, samples


def drive_signal(drives: DriveSet, t: float) -> float:
    """sum_f Re(A_f exp(-i w_f t))."""
    total = 0.0
    for f in drives.fields:
        a = complex(f.amplitude)
        total += a.real * math.cos(f.frequency * t) + a.imag * math.sin(f.frequency * t)
    return total


def _fastest_rate(system: LevelSystem, drives: DriveSet) -> float:
    transitions = [abs(system.transition(*e)) for e in system.edges] or [0.0]
    frequencies = list(drives.frequencies) or [0.0]
    return max(transitions) + max(frequencies)


def dump_trajectory(path: Path | str, samples: list[tuple[float, np.ndarray]]) -> Path:
    """Write (t, Re psi_k, Im psi_k) rows as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    times = np.array([t for t, _ in samples])
    states = np.array([y for _, y in samples])
    columns = {"t": times}
    for k in range(states.shape[1]):
        columns[f"re_{k}"] = states[:, k].real
        columns[f"im_{k}"] = states[:, k].imag
    pd.DataFrame(columns).to_csv(path, index=False, float_format="%.17g")
    return path


def propagate_exact(
    system: LevelSystem,
    drives: DriveSet,
    psi0: StateVector,
    duration: float,
    tol: float = DEFAULT_TOL,
    stop: threading.Event | None = None,
    trajectory: Path | str | None = None,
) -> PropagationResult:
    """
    Integrate i d(psi)/dt = [H_D + sum_f Re(A_f exp(-i w_f t)) H_C] psi.

    The norm is never renormalized; its drift is reported.

    Raises:
        ControlError: FRAME_MISMATCH unless psi0 is a lab-frame state at t=0,
            STEP_SIZE_UNDERFLOW, INTEGRATION_FAILED or CANCELLED.
    """
    if psi0.frame is not Frame.LAB or psi0.time != 0:
        raise ControlError("FRAME_MISMATCH", message="Exact propagation starts from a lab-frame state at t=0")
    if duration < 0:
        raise ControlError("INVALID_CONFIG", message="duration must be nonnegative")

    energies = np.asarray(system.energies, dtype=float)
    hc = system.control_matrix()

    def rhs(t, c):
        phase = np.exp(1j * energies * t)
        return -1j * drive_signal(drives, t) * phase * (hc @ (c / phase))

    fastest = _fastest_rate(system, drives)
    max_step = math.pi / (2 * fastest) if fastest > 0 else np.inf

    if duration == 0:
        c, steps, evaluations, samples = psi0.amplitudes.copy(), 0, 0, [(0.0, psi0.amplitudes.copy())]
    else:
        c, steps, evaluations, samples = integrate(
            rhs, psi0.amplitudes, duration, tol=tol, max_step=max_step, stop=stop, record=trajectory is not None
        )

    psi = c * np.exp(-1j * energies * duration)
    drift = abs(float(np.linalg.norm(psi)) - psi0.norm)
    if drift > 10 * tol:
        logger.warning("Exact propagation norm drift %.3g exceeds 10*tol (T=%g, steps=%d)", drift, duration, steps)
    logger.debug("Exact propagation: T=%g steps=%d nfev=%d drift=%.2g", duration, steps, evaluations, drift)

    if trajectory is not None:
        lab = [(t, y * np.exp(-1j * energies * t)) for t, y in samples]
        dump_trajectory(trajectory, lab)

    return PropagationResult(
        state=StateVector(psi, Frame.LAB, duration),
        duration=duration,
        steps=steps,
        evaluations=evaluations,
        norm_drift=drift,
        method="dop853",
    )

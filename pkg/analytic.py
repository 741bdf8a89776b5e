"""
Closed-form transfers for the two-level system and the star.

Conventions follow the effective generator built by `rwa`: for a single
edge driven with complex amplitude A at detuning Delta (E_1 - E_0 - w),
starting from (1, 0),

    c_0(t) = exp(-i Delta t/2) (cos(R t/2) + i (Delta/R) sin(R t/2))
    c_1(t) = -i exp(+i Delta t/2) (A/R) sin(R t/2)

with R = sqrt(Delta^2 + |A|^2). A star with equal detunings behaves the
same way with A -> A_k on each leaf and |A|^2 -> sum_k |A_k|^2.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from pulseman.exceptions import ControlError
from pulseman.protocols.control import ControlSolution, StarGoal, TwoLevelGoal

REACH_TOL = 1e-12


def _clip(x: float) -> float:
    return max(-1.0, min(1.0, x))


def rabi(amplitudes: Sequence[complex], detuning: float) -> float:
    """Effective Rabi scale sqrt(Delta^2 + sum |A_k|^2)."""
    return math.sqrt(detuning**2 + sum(abs(a) ** 2 for a in amplitudes))


def _center_bracket(detuning: float, scale: float, t: float) -> complex:
    # cos(Rt/2) + i (Delta/R) sin(Rt/2); equals 1 when R = 0.
    if scale == 0:
        return 1.0 + 0j
    half = 0.5 * scale * t
    return complex(math.cos(half), (detuning / scale) * math.sin(half))


def star_evolve(amplitudes: Sequence[complex], detuning: float, t: float) -> np.ndarray:
    """c-frame coefficients (center first) of a star started in its center."""
    amplitudes = [complex(a) for a in amplitudes]
    scale = rabi(amplitudes, detuning)
    c = np.zeros(len(amplitudes) + 1, dtype=complex)
    c[0] = np.exp(-0.5j * detuning * t) * _center_bracket(detuning, scale, t)
    if scale > 0:
        envelope = -1j * np.exp(0.5j * detuning * t) * math.sin(0.5 * scale * t) / scale
        c[1:] = envelope * np.asarray(amplitudes)
    return c


def two_level_evolve(amplitude: complex, detuning: float, t: float) -> tuple[complex, complex]:
    c0, c1 = star_evolve([amplitude], detuning, t)
    return complex(c0), complex(c1)


def star_generator(amplitudes: Sequence[complex], detuning: float) -> np.ndarray:
    """
    Effective generator of the star, center at index 0.

    Leaf rows carry A_k/2 in the center column and Delta on the diagonal.
    """
    n = len(amplitudes) + 1
    g = np.zeros((n, n), dtype=complex)
    for k, a in enumerate(amplitudes, start=1):
        g[k, 0] = 0.5 * complex(a)
        g[0, k] = 0.5 * complex(a).conjugate()
        g[k, k] = detuning
    return g


def max_reachable_theta(amplitude: float, detuning: float) -> float:
    """Largest Bloch polar angle reachable from the ground state: 2 arcsin(|A|/R)."""
    scale = rabi([amplitude], detuning)
    if scale == 0:
        return 0.0
    return 2.0 * math.asin(_clip(abs(amplitude) / scale))


def check_two_level_reachable(goal: TwoLevelGoal, amplitude: float, detuning: float) -> bool:
    return goal.theta <= max_reachable_theta(amplitude, detuning) + REACH_TOL


def _solve(
    center: float,
    leaf_moduli: Sequence[float],
    leaf_phases: Sequence[float],
    budget: float,
    detuning: float,
) -> ControlSolution:
    """
    Shared two-level/star solver.

    `center` is |c_0| of the goal, `budget` the total sqrt(sum |A_k|^2).
    Leaf amplitudes come out proportional to the leaf moduli.
    """
    excited = math.sqrt(max(0.0, 1.0 - center * center))
    n = len(leaf_moduli)

    if excited <= REACH_TOL:
        return ControlSolution(
            amplitudes=(0.0,) * n,
            phases=tuple(float(p) % (2 * math.pi) for p in leaf_phases),
            duration=0.0,
            rabi=abs(detuning),
        )

    scale = math.sqrt(detuning**2 + budget**2)
    max_excited = budget / scale if scale > 0 else 0.0
    if excited > max_excited + REACH_TOL:
        raise ControlError(
            "UNREACHABLE",
            max_theta=2.0 * math.asin(_clip(max_excited)),
            required=2.0 * math.asin(_clip(excited)),
        )

    duration = (2.0 / scale) * math.asin(_clip(scale * excited / budget))
    bracket = _center_bracket(detuning, scale, duration)
    offset = math.pi / 2 - detuning * duration + (math.atan2(bracket.imag, bracket.real) if abs(bracket) > 0 else 0.0)

    amplitudes = tuple(budget * m / excited for m in leaf_moduli)
    phases = tuple((p + offset) % (2 * math.pi) for p in leaf_phases)
    return ControlSolution(amplitudes=amplitudes, phases=phases, duration=duration, rabi=scale)


def two_level_solve(goal: TwoLevelGoal, amplitude: float, detuning: float) -> ControlSolution:
    """
    Minimal-time pulse reaching a Bloch goal from the ground state.

    Raises:
        ControlError: UNREACHABLE (with `max_theta`) when
            2 arcsin(|A|/R) < theta.
    """
    if not amplitude > 0:
        raise ControlError("INVALID_CONFIG", message="amplitude must be positive", amplitude=amplitude)
    return _solve(
        center=math.cos(goal.theta / 2),
        leaf_moduli=(math.sin(goal.theta / 2),),
        leaf_phases=(goal.phi,),
        budget=abs(amplitude),
        detuning=detuning,
    )


def star_solve(goal: StarGoal, amplitudes: Sequence[float], detuning: float) -> ControlSolution:
    """
    Minimal-time star pulse for a goal of moduli xi and phases beta.

    The drive budget sum |A_k|^2 is kept and redistributed so that |A_k| is
    proportional to xi_k, which is the only way all leaves can match at one
    common time.

    Raises:
        ControlError: INCONSISTENT_GOAL when a populated leaf has no drive,
            UNREACHABLE when the budget cannot empty the center far enough.
    """
    amplitudes = [abs(float(a)) for a in amplitudes]
    if len(amplitudes) != goal.dimension - 1:
        raise ControlError("INCONSISTENT_GOAL", message="Need one amplitude per leaf")
    for k, (a, x) in enumerate(zip(amplitudes, goal.xi[1:]), start=1):
        if x > REACH_TOL and a == 0:
            raise ControlError("INCONSISTENT_GOAL", message="Populated leaf has no drive", leaf=k)
    budget = math.sqrt(sum(a * a for a in amplitudes))
    if budget == 0 and goal.xi[0] < 1.0 - REACH_TOL:
        raise ControlError("INCONSISTENT_GOAL", message="No drive budget", leaf=None)
    return _solve(
        center=goal.xi[0],
        leaf_moduli=goal.xi[1:],
        leaf_phases=goal.beta,
        budget=budget,
        detuning=detuning,
    )


def bloch_goal(vector: Sequence[complex]) -> TwoLevelGoal:
    """Bloch angles of a normalized 2-vector, global phase removed."""
    c0, c1 = (complex(v) for v in vector)
    norm = math.hypot(abs(c0), abs(c1))
    if norm == 0:
        raise ControlError("INVALID_PAYLOAD", message="Zero vector")
    theta = 2.0 * math.atan2(abs(c1), abs(c0))
    phi = (np.angle(c1) - np.angle(c0)) if abs(c1) > 0 else 0.0
    return TwoLevelGoal(theta=min(theta, math.pi), phi=float(phi))


def star_goal(vector: Sequence[complex]) -> StarGoal:
    """Star goal of a normalized vector (center first), global phase fixed by the center."""
    vector = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise ControlError("INVALID_PAYLOAD", message="Zero vector")
    vector = vector / norm
    reference = np.angle(vector[0]) if abs(vector[0]) > 0 else 0.0
    xi = np.abs(vector)
    xi = xi / math.sqrt(float(np.sum(xi**2)))
    beta = [float((np.angle(v) - reference) % (2 * math.pi)) if abs(v) > 0 else 0.0 for v in vector[1:]]
    return StarGoal(xi=tuple(float(x) for x in xi), beta=tuple(beta))

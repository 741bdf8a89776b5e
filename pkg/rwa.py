"""
Multilevel rotating wave approximation.

Every drive field is matched to the one coupled transition it is nearly
resonant with. Keeping only the co-rotating part of each field gives the
matrix M(II); subtracting diag(gamma) gives a time-independent generator
for the rotating-frame coefficients b_k = exp(i gamma_k t) c_k.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence

import numpy as np

from pulseman import graph as level_graph
from pulseman.exceptions import ControlError
from pulseman.protocols.system import (
    DriveField,
    DriveSet,
    Edge,
    EffectiveGenerator,
    GammaAssignment,
    LevelSystem,
    RwaValidityReport,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-14


def default_window(system: LevelSystem, factor: float = 0.1) -> float:
    """factor * (smallest gap between coupled transition frequencies, or the smallest frequency)."""
    freqs = sorted(abs(system.transition(*e)) for e in system.edges)
    if not freqs:
        raise ControlError("INVALID_SYSTEM", message="System has no coupled transitions")
    candidates = [f for f in freqs if f > 0]
    candidates += [b - a for a, b in itertools.pairwise(freqs) if b - a > 0]
    if not candidates:
        raise ControlError("INVALID_SYSTEM", message="All coupled transitions are degenerate at zero")
    return factor * min(candidates)


def assign_fields(
    system: LevelSystem,
    frequencies: Sequence[float],
    window: float | None = None,
    amplitudes: Sequence[complex] | None = None,
) -> DriveSet:
    """
    Match each frequency to the unique coupled transition within `window`.

    Raises:
        ControlError: NO_RESONANT_TRANSITION, AMBIGUOUS_RESONANCE or DUPLICATE_DRIVE.
    """
    if window is None:
        window = default_window(system)
    if not window > 0:
        raise ControlError("INVALID_CONFIG", message="window must be positive", window=window)
    if amplitudes is None:
        amplitudes = [0j] * len(frequencies)
    if len(amplitudes) != len(frequencies):
        raise ControlError("INVALID_CONFIG", message="Need one amplitude per frequency")

    assignment: list[Edge] = []
    owner: dict[Edge, int] = {}
    for f, omega in enumerate(frequencies):
        matches = [e for e in system.edges if abs(abs(system.transition(*e)) - omega) < window]
        if not matches:
            raise ControlError("NO_RESONANT_TRANSITION", field=f, frequency=omega)
        if len(matches) > 1:
            raise ControlError("AMBIGUOUS_RESONANCE", field=f, frequency=omega, edges=matches)
        (edge,) = matches
        if edge in owner:
            raise ControlError("DUPLICATE_DRIVE", edge=edge, field=f, other=owner[edge])
        owner[edge] = f
        assignment.append(system.upper_lower(edge))

    fields = tuple(DriveField(complex(a), float(w)) for a, w in zip(amplitudes, frequencies))
    return DriveSet(fields, tuple(assignment))


def _check_assignment(system: LevelSystem, drives: DriveSet, sparse: bool) -> None:
    coupled = set(system.edges)
    for f, (u, l) in enumerate(drives.assignment):
        if (min(u, l), max(u, l)) not in coupled:
            raise ControlError("INVALID_CONFIG", message="Field assigned to an uncoupled pair", field=f, edge=(u, l))
        if system.energies[u] <= system.energies[l]:
            raise ControlError("INVALID_CONFIG", message="Assignment must list (upper, lower)", field=f, edge=(u, l))
    if not sparse:
        for edge in system.edges:
            if drives.field_for(edge) is None:
                raise ControlError("UNASSIGNED_EDGE", edge=edge)


def driven_system(system: LevelSystem, drives: DriveSet) -> LevelSystem:
    """Same spectrum, keeping only the couplings some field drives."""
    driven = {(min(e), max(e)) for e in drives.assignment}
    return LevelSystem(system.energies, tuple(c for c in system.couplings if c.edge in driven))


def oriented_detunings(system: LevelSystem, drives: DriveSet) -> dict[Edge, float]:
    """Signed detuning per driven edge, keyed (upper, lower): E_upper - E_lower - omega_f."""
    return {
        (u, l): system.transition(u, l) - field.frequency
        for field, (u, l) in zip(drives.fields, drives.assignment)
    }


def build_m2(system: LevelSystem, drives: DriveSet, sparse: bool = False) -> np.ndarray:
    """
    Co-rotating drive matrix.

    M[u, l] = A_f (H_C)_{ul} / 2 for upper level u, M[l, u] its conjugate;
    zero on uncoupled or (with `sparse`) undriven pairs.
    """
    _check_assignment(system, drives, sparse)
    n = system.dimension
    m2 = np.zeros((n, n), dtype=complex)
    for field, (u, l) in zip(drives.fields, drives.assignment):
        value = 0.5 * complex(field.amplitude) * system.coupling(u, l)
        m2[u, l] = value
        m2[l, u] = value.conjugate()
    return m2


def _assert_hermitian(matrix: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ControlError("NON_HERMITIAN_GENERATOR")


def build_effective_generator(
    m2: np.ndarray, gamma: GammaAssignment, tol: float = level_graph.RESIDUAL_TOL
) -> EffectiveGenerator:
    """M(II) - diag(gamma), refusing assignments whose residuals do not vanish."""
    if not gamma.vanishes(tol):
        raise ControlError(
            "NONVANISHING_RESIDUALS",
            residuals=dict(gamma.residuals),
            worst=gamma.max_relative_residual,
        )
    matrix = np.asarray(m2, dtype=complex) - np.diag(np.asarray(gamma.gamma, dtype=complex))
    _assert_hermitian(matrix)
    matrix.setflags(write=False)
    return EffectiveGenerator(matrix=matrix, gamma=gamma)


def check_validity(system: LevelSystem, drives: DriveSet, bound: float = 1e-2) -> RwaValidityReport:
    detunings = oriented_detunings(system, drives)
    detuning_ratios = []
    amplitude_ratios = []
    for field, edge in zip(drives.fields, drives.assignment):
        detuning_ratios.append(abs(detunings[edge]) / field.frequency)
        amplitude_ratios.append(abs(field.amplitude) / field.frequency)
    report = RwaValidityReport(
        detuning_ratios=tuple(detuning_ratios),
        amplitude_ratios=tuple(amplitude_ratios),
        bound=bound,
    )
    if not report.passed:
        logger.warning("RWA validity check failed: worst ratio %.3g >= bound %.3g", report.worst_ratio, bound)
    return report


def off_resonance_gap(system: LevelSystem, drives: DriveSet) -> float:
    """
    Distance from each field to every frequency it must not drive, minimized over fields.

    Field f at omega_f sees its own counter-rotating term at 2 omega_f and
    every other coupled transition at ||E_e| - omega_f|; the smaller of
    omega_f and those offsets is the scale its amplitude has to stay under.
    """
    gaps = []
    for field, edge in zip(drives.fields, drives.assignment):
        own = (min(edge), max(edge))
        offsets = [abs(abs(system.transition(*e)) - field.frequency) for e in system.edges if e != own]
        gaps.append(min([field.frequency, *offsets]))
    if not gaps:
        raise ControlError("INVALID_CONFIG", message="No drive fields")
    return float(min(gaps))


def effective_model(
    system: LevelSystem,
    drives: DriveSet,
    sparse: bool = False,
    root_value: float = 0.0,
) -> EffectiveGenerator:
    """
    Build the effective generator in one go.

    Cyclic graphs are accepted when every cycle has a vanishing detuning sum.
    """
    m2 = build_m2(system, drives, sparse=sparse)
    reduced = driven_system(system, drives) if sparse else system
    g = level_graph.build_graph(reduced)
    detunings = oriented_detunings(system, drives)
    if g.acyclic:
        gamma = level_graph.assign_gamma(g, detunings, root_value)
    else:
        report = level_graph.check_cycle_consistency(g, detunings, root_value)
        if not report.reducible:
            cycle, total = report.blocking[0]
            raise ControlError("CYCLIC_GRAPH", cycle=cycle, detuning_sum=total)
        gamma = report.gamma
    return build_effective_generator(m2, gamma)


def b_frame_phases(gamma: GammaAssignment, times: Sequence[float]) -> np.ndarray:
    """exp(i (gamma_k - gamma_j + Delta_kj) t) per time (rows) and edge (columns, sorted)."""
    edges = sorted(gamma.residuals)
    rates = np.array([gamma.residuals[e] for e in edges])
    return np.exp(1j * np.outer(np.asarray(times, dtype=float), rates))


def b_frame_hamiltonian(m2: np.ndarray, gamma: GammaAssignment, t: float) -> np.ndarray:
    """Rotating-frame RWA Hamiltonian at time t; constant when the residuals vanish."""
    n = m2.shape[0]
    h = np.zeros((n, n), dtype=complex)
    g = gamma.gamma
    for (k, j), delta in gamma.detunings.items():
        phase = np.exp(1j * (g[k] - g[j] + delta) * t)
        h[k, j] = m2[k, j] * phase
        h[j, k] = m2[j, k] * np.conj(phase)
    return h - np.diag(np.asarray(g, dtype=complex))

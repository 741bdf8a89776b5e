"""Random transfer instances: non-degenerate spectra on uniform random trees."""

from __future__ import annotations

import logging

import networkx as nx
import numpy as np

from pulseman import graph as level_graph
from pulseman import rwa
from pulseman.exceptions import ControlError
from pulseman.optimize import random_goal
from pulseman.protocols.dynamics import StateVector
from pulseman.protocols.experiments import RandomInstance, RandomInstanceSpec
from pulseman.protocols.system import DriveField, DriveSet, LevelSystem

logger = logging.getLogger(__name__)


def instance_seed(master_seed: int, dimension: int, detuning: float, index: int) -> int:
    """Deterministic 63-bit seed for one sweep cell entry."""
    bits = int(np.float64(detuning).view(np.uint64))
    sequence = np.random.SeedSequence([int(master_seed), int(dimension), bits, int(index)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def random_tree(rng: np.random.Generator, dimension: int) -> list[tuple[int, int]]:
    """Uniform labelled tree through a random Pruefer sequence."""
    if dimension == 2:
        return [(0, 1)]
    sequence = rng.integers(0, dimension, dimension - 2).tolist()
    tree = nx.from_prufer_sequence(sequence)
    return sorted((min(k, j), max(k, j)) for k, j in tree.edges)


def _spectrum_ok(system: LevelSystem, spec: RandomInstanceSpec) -> bool:
    floor = spec.min_gap + abs(spec.detuning)
    if any(abs(system.transition(*e)) <= floor for e in system.edges):
        return False
    return level_graph.check_nondegenerate(system, gap_tol=spec.min_gap, strict=spec.strict).valid


def _drives(system: LevelSystem, edges, detuning: float) -> DriveSet:
    assignment = tuple(system.upper_lower(e) for e in edges)
    return DriveSet(tuple(DriveField(0j, system.transition(u, l) - detuning) for u, l in assignment), assignment)


def random_instance(spec: RandomInstanceSpec) -> RandomInstance:
    """
    Draw a tree, a spectrum and a goal.

    Energies are resampled until every driven transition exceeds
    min_gap + |detuning|, transition frequencies are pairwise more than
    min_gap apart, and no drive comes within min_gap / 2 of another
    coupled transition. Every edge is driven at
    w = E_upper - E_lower - detuning and the amplitude bound is
    `amplitude_fraction` times the off-resonance gap: the smallest distance
    from any w to its own counter-rotating frequency or to another coupled
    transition.

    Raises:
        ControlError: RESAMPLE_EXHAUSTED after `max_attempts` spectra.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.dimension
    edges = random_tree(rng, n)
    low, high = spec.bounds

    for attempt in range(spec.max_attempts):
        energies = np.sort(rng.uniform(low, high, n))
        system = LevelSystem.from_edges(energies.tolist(), edges)
        if not _spectrum_ok(system, spec):
            continue
        drives = _drives(system, edges, spec.detuning)
        gap = rwa.off_resonance_gap(system, drives)
        if gap > 0.5 * spec.min_gap:
            break
    else:
        raise ControlError("RESAMPLE_EXHAUSTED", dimension=n, attempts=spec.max_attempts, min_gap=spec.min_gap)
    logger.debug("Spectrum accepted after %d draws (N=%d, gap %.3g)", attempt + 1, n, gap)

    goal = StateVector(random_goal(rng, n))

    return RandomInstance(
        system=system,
        drives=drives,
        initial=StateVector.basis(n, 0),
        goal=goal,
        detuning=spec.detuning,
        amplitude_bound=spec.amplitude_fraction * gap,
        seed=spec.seed if isinstance(spec.seed, int) else None,
    )

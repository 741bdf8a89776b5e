"""
Level graphs.

A level scheme maps onto an undirected graph: one vertex per level, one edge
per nonzero coupling. Trees are pruned pendant by pendant; re-adding the
vertices in reverse order fixes the frame weights gamma one equation at a
time.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping

import networkx as nx

from pulseman.exceptions import ControlError
from pulseman.protocols.system import (
    Coupling,
    CycleReport,
    DegeneracyReport,
    Edge,
    GammaAssignment,
    LevelGraph,
    LevelSystem,
    PruneOrder,
)

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-12


def build_graph(system: LevelSystem) -> LevelGraph:
    g = nx.Graph()
    g.add_nodes_from(range(system.dimension))
    g.add_edges_from(system.edges)
    return LevelGraph(graph=g, connected=nx.is_connected(g), acyclic=nx.is_forest(g))


def _require_tree(graph: LevelGraph) -> None:
    if not graph.connected:
        raise ControlError("DISCONNECTED_GRAPH", components=connected_components(graph))
    if not graph.acyclic:
        raise ControlError("CYCLIC_GRAPH", cycle=find_cycles(graph)[0])


def check_nondegenerate(system: LevelSystem, gap_tol: float = 1e-6, strict: bool = False) -> DegeneracyReport:
    """
    Compare transition frequencies pairwise.

    Only coupled transitions are compared unless `strict`, in which case every
    level pair takes part.
    """
    if strict:
        pairs = list(itertools.combinations(range(system.dimension), 2))
    else:
        pairs = list(system.edges)

    violations = []
    for a, b in itertools.combinations(pairs, 2):
        gap = abs(abs(system.transition(*a)) - abs(system.transition(*b)))
        if gap <= gap_tol:
            violations.append((a, b, gap))
    return DegeneracyReport(violations=tuple(violations), gap_tol=gap_tol, strict=strict)


def prune_order(graph: LevelGraph) -> PruneOrder:
    """
    Remove pendant vertices round by round until one root is left.

    Within a round pendants go out lowest index first. When only two vertices
    are left the higher index is removed, so the lower one becomes the root.
    """
    _require_tree(graph)

    g = graph.graph.copy()
    removals: list[Edge] = []
    while g.number_of_nodes() > 1:
        if g.number_of_nodes() == 2:
            low, high = sorted(g.nodes)
            removals.append((high, low))
            g.remove_node(high)
            break
        pendants = sorted(v for v in g.nodes if g.degree(v) == 1)
        for v in pendants:
            (successor,) = g.neighbors(v)
            removals.append((v, successor))
        g.remove_nodes_from(pendants)

    (root,) = g.nodes
    return PruneOrder(removals=tuple(removals), root=root)


def oriented(detunings: Mapping[Edge, float], k: int, j: int) -> float:
    """Delta_kj from a map keyed by either orientation (Delta_jk = -Delta_kj)."""
    if (k, j) in detunings:
        return float(detunings[(k, j)])
    if (j, k) in detunings:
        return -float(detunings[(j, k)])
    raise ControlError("UNASSIGNED_EDGE", edge=(min(k, j), max(k, j)))


def _residuals(graph: LevelGraph, gamma: list[float], detunings: Mapping[Edge, float]):
    deltas = {}
    residuals = {}
    for k, j in graph.edges:
        delta = oriented(detunings, k, j)
        deltas[(k, j)] = delta
        residuals[(k, j)] = gamma[k] - gamma[j] + delta
    return deltas, residuals


def assign_gamma(graph: LevelGraph, detunings: Mapping[Edge, float], root_value: float = 0.0) -> GammaAssignment:
    """
    Solve gamma_k - gamma_j + Delta_kj = 0 on every tree edge.

    `detunings` maps (k, j) to Delta_kj; only one orientation per edge is needed.
    """
    order = prune_order(graph)
    gamma = [0.0] * len(graph.vertices)
    gamma[order.root] = float(root_value)
    for vertex, successor in reversed(order.removals):
        gamma[vertex] = gamma[successor] - oriented(detunings, vertex, successor)

    deltas, residuals = _residuals(graph, gamma, detunings)
    return GammaAssignment(gamma=tuple(gamma), root=order.root, detunings=deltas, residuals=residuals)


def _canonical_cycle(cycle: Iterable[int]) -> tuple[int, ...]:
    cycle = list(cycle)
    start = cycle.index(min(cycle))
    cycle = cycle[start:] + cycle[:start]
    if len(cycle) > 2 and cycle[-1] < cycle[1]:
        cycle = [cycle[0]] + cycle[1:][::-1]
    return tuple(cycle)


def find_cycles(graph: LevelGraph) -> tuple[tuple[int, ...], ...]:
    """Fundamental cycles, each starting at its lowest vertex and heading to its lower neighbour."""
    basis = nx.cycle_basis(graph.graph)
    return tuple(sorted(_canonical_cycle(c) for c in basis))


def cycle_sum(cycle: tuple[int, ...], detunings: Mapping[Edge, float]) -> float:
    closed = cycle + cycle[:1]
    return sum(oriented(detunings, k, j) for k, j in itertools.pairwise(closed))


def check_cycle_consistency(
    graph: LevelGraph,
    detunings: Mapping[Edge, float],
    root_value: float = 0.0,
    tol: float = RESIDUAL_TOL,
) -> CycleReport:
    """
    Signed detuning sum around every fundamental cycle.

    A time-independent frame exists iff every sum vanishes; in that case the
    gamma assignment comes from a breadth-first spanning tree.
    """
    if not graph.connected:
        raise ControlError("DISCONNECTED_GRAPH", components=connected_components(graph))

    cycles = []
    blocking = []
    for cycle in find_cycles(graph):
        total = cycle_sum(cycle, detunings)
        scale = sum(abs(oriented(detunings, k, j)) for k, j in itertools.pairwise(cycle + cycle[:1]))
        cycles.append((cycle, total))
        if abs(total) > tol * max(1.0, scale):
            blocking.append((cycle, total))

    if blocking:
        logger.debug("Cycle check: %d of %d cycles block reduction", len(blocking), len(cycles))
        return CycleReport(cycles=tuple(cycles), blocking=tuple(blocking), gamma=None)

    if graph.acyclic:
        gamma = assign_gamma(graph, detunings, root_value)
    else:
        root = min(graph.vertices)
        tree = nx.Graph(nx.bfs_tree(graph.graph, root))
        tree.add_nodes_from(graph.vertices)
        tree_graph = LevelGraph(graph=tree, connected=True, acyclic=True)
        spanning = assign_gamma(tree_graph, detunings, root_value)
        deltas, residuals = _residuals(graph, list(spanning.gamma), detunings)
        gamma = GammaAssignment(gamma=spanning.gamma, root=spanning.root, detunings=deltas, residuals=residuals)
    return CycleReport(cycles=tuple(cycles), blocking=(), gamma=gamma)


def connected_components(graph: LevelGraph) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(c)) for c in nx.connected_components(graph.graph)))


def subgraph(system: LevelSystem, vertices: Iterable[int]) -> tuple[LevelSystem, tuple[int, ...]]:
    """
    Restrict a system to `vertices`.

    Returns the re-indexed system and the original index of each new level.
    """
    kept = tuple(sorted(set(vertices)))
    position = {old: new for new, old in enumerate(kept)}
    couplings = tuple(
        Coupling(position[c.k], position[c.j], c.value)
        for c in system.couplings
        if c.k in position and c.j in position
    )
    energies = tuple(system.energies[v] for v in kept)
    return LevelSystem(energies, couplings), kept


def is_star(graph: LevelGraph) -> int | None:
    """Center of a star-shaped tree, or None."""
    if not graph.is_tree:
        return None
    n = len(graph.vertices)
    for v in graph.vertices:
        if graph.degree(v) == n - 1:
            return v
    return None

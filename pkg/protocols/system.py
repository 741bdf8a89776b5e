"""Level scheme, graph and drive protocols."""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from pulseman.exceptions import ControlError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Coupling:
    """One off-diagonal entry (H_C)_{kj}; the (j, k) entry is its conjugate."""

    k: int
    j: int
    value: complex = 1.0

    @property
    def edge(self) -> Edge:
        return (min(self.k, self.j), max(self.k, self.j))

    def oriented(self, k: int, j: int) -> complex:
        """Return (H_C)_{kj} for either orientation of this coupling."""
        if (k, j) == (self.k, self.j):
            return complex(self.value)
        return complex(self.value).conjugate()


@dataclass(frozen=True)
class LevelSystem:
    """
    Drift spectrum plus Hermitian, zero-diagonal control coupling pattern.

    Energies are in arbitrary energy units with hbar = 1. Couplings with a
    zero value are kept but do not produce graph edges.
    """

    energies: tuple[float, ...]
    couplings: tuple[Coupling, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        object.__setattr__(self, "couplings", tuple(self.couplings))

        n = len(self.energies)
        if n < 2:
            raise ControlError("INVALID_SYSTEM", message="A level system needs at least two levels", dimension=n)
        if not all(math.isfinite(e) for e in self.energies):
            raise ControlError("INVALID_SYSTEM", message="Energies must be finite")

        seen: set[Edge] = set()
        for coupling in self.couplings:
            if coupling.k == coupling.j:
                raise ControlError("INVALID_SYSTEM", message="Self-loops are not allowed", edge=(coupling.k, coupling.j))
            if not (0 <= coupling.k < n and 0 <= coupling.j < n):
                raise ControlError("INVALID_SYSTEM", message="Coupling index out of range", edge=(coupling.k, coupling.j))
            if not np.isfinite(complex(coupling.value)):
                raise ControlError("INVALID_SYSTEM", message="Coupling must be finite", edge=coupling.edge)
            if coupling.edge in seen:
                raise ControlError("INVALID_SYSTEM", message="Duplicate coupling", edge=coupling.edge)
            seen.add(coupling.edge)

    @classmethod
    def from_edges(cls, energies, edges, value: complex = 1.0) -> LevelSystem:
        """Build a system with the same coupling strength on every edge."""
        return cls(tuple(energies), tuple(Coupling(k, j, value) for k, j in edges))

    @property
    def dimension(self) -> int:
        return len(self.energies)

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Coupled pairs as (low index, high index), sorted."""
        return tuple(sorted(c.edge for c in self.couplings if complex(c.value) != 0))

    def coupling(self, k: int, j: int) -> complex:
        for c in self.couplings:
            if c.edge == (min(k, j), max(k, j)):
                return c.oriented(k, j)
        return 0j

    def transition(self, k: int, j: int) -> float:
        """E_kj = E_k - E_j."""
        return self.energies[k] - self.energies[j]

    def upper_lower(self, edge: Edge) -> Edge:
        """Orient an edge as (upper level, lower level)."""
        k, j = edge
        return (k, j) if self.energies[k] > self.energies[j] else (j, k)

    def drift(self) -> np.ndarray:
        return np.diag(np.asarray(self.energies, dtype=complex))

    def control_matrix(self) -> np.ndarray:
        """Dense Hermitian H_C."""
        hc = np.zeros((self.dimension, self.dimension), dtype=complex)
        for c in self.couplings:
            hc[c.k, c.j] = complex(c.value)
            hc[c.j, c.k] = complex(c.value).conjugate()
        return hc


@dataclass(frozen=True, eq=False)
class LevelGraph:
    """
    Undirected graph with one vertex per level and one edge per nonzero coupling.

    `connected` and `acyclic` are computed once at construction.
    """

    graph: nx.Graph
    connected: bool
    acyclic: bool

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.graph.nodes))

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted((min(k, j), max(k, j)) for k, j in self.graph.edges))

    @property
    def is_tree(self) -> bool:
        return self.connected and self.acyclic

    def neighbors(self, vertex: int) -> tuple[int, ...]:
        return tuple(sorted(self.graph.neighbors(vertex)))

    def degree(self, vertex: int) -> int:
        return self.graph.degree(vertex)


@dataclass(frozen=True)
class PruneOrder:
    """Pendant-vertex removal sequence: (vertex, successor) pairs plus the surviving root."""

    removals: tuple[Edge, ...]
    root: int

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.removals)

    def __len__(self) -> int:
        return len(self.removals)


@dataclass(frozen=True)
class GammaAssignment:
    """
    Per-level frame weights making the RWA Hamiltonian time-independent.

    `detunings` holds the oriented Delta_kj used for every edge, keyed by the
    edge as (low, high); `residuals` holds gamma_k - gamma_j + Delta_kj for
    the same keys.
    """

    gamma: tuple[float, ...]
    root: int
    detunings: Mapping[Edge, float] = field(default_factory=dict)
    residuals: Mapping[Edge, float] = field(default_factory=dict)

    @property
    def max_relative_residual(self) -> float:
        if not self.residuals:
            return 0.0
        return max(abs(r) / max(1.0, abs(self.detunings.get(e, 0.0))) for e, r in self.residuals.items())

    def vanishes(self, tol: float = 1e-12) -> bool:
        return self.max_relative_residual <= tol


@dataclass(frozen=True)
class DegeneracyReport:
    """Transition pairs whose frequencies coincide within gap_tol."""

    violations: tuple[tuple[Edge, Edge, float], ...]
    gap_tol: float
    strict: bool

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class CycleReport:
    """
    Signed detuning sums around each fundamental cycle.

    `cycles` lists every fundamental cycle with its sum; `blocking` only those
    whose sum does not vanish. `gamma` is set when the graph is reducible.
    """

    cycles: tuple[tuple[tuple[int, ...], float], ...]
    blocking: tuple[tuple[tuple[int, ...], float], ...]
    gamma: GammaAssignment | None

    @property
    def reducible(self) -> bool:
        return not self.blocking


@dataclass(frozen=True)
class DriveField:
    """A constant laser: complex amplitude A_f and frequency omega_f (energy units)."""

    amplitude: complex
    frequency: float

    @classmethod
    def polar(cls, magnitude: float, phase: float, frequency: float) -> DriveField:
        return cls(magnitude * complex(math.cos(phase), math.sin(phase)), frequency)


@dataclass(frozen=True)
class DriveSet:
    """
    Drive fields and their field -> edge resonance assignment.

    `assignment[f]` is the (upper, lower) level pair driven by field f.
    """

    fields: tuple[DriveField, ...]
    assignment: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        object.__setattr__(self, "assignment", tuple(tuple(e) for e in self.assignment))
        if len(self.fields) != len(self.assignment):
            raise ControlError("INVALID_CONFIG", message="Every field needs exactly one edge")
        for f, drive in enumerate(self.fields):
            if not drive.frequency > 0:
                raise ControlError("INVALID_CONFIG", message="Drive frequencies must be positive", field=f)
        undirected = [(min(e), max(e)) for e in self.assignment]
        if len(set(undirected)) != len(undirected):
            duplicated = next(e for e in undirected if undirected.count(e) > 1)
            raise ControlError("DUPLICATE_DRIVE", edge=duplicated)

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(f.frequency for f in self.fields)

    @property
    def amplitudes(self) -> tuple[complex, ...]:
        return tuple(complex(f.amplitude) for f in self.fields)

    def field_for(self, edge: Edge) -> int | None:
        key = (min(edge), max(edge))
        for f, assigned in enumerate(self.assignment):
            if (min(assigned), max(assigned)) == key:
                return f
        return None

    def with_amplitudes(self, amplitudes) -> DriveSet:
        amplitudes = tuple(amplitudes)
        if len(amplitudes) != len(self.fields):
            raise ControlError("INVALID_CONFIG", message="Amplitude count does not match field count")
        return DriveSet(
            tuple(DriveField(complex(a), f.frequency) for a, f in zip(amplitudes, self.fields)),
            self.assignment,
        )


@dataclass(frozen=True, eq=False)
class EffectiveGenerator:
    """Hermitian M(II) - diag(gamma); acts on rotating-frame (b) coefficients."""

    matrix: np.ndarray
    gamma: GammaAssignment

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class RwaValidityReport:
    """Per-field |Delta|/omega and |A|/omega ratios checked against a bound."""

    detuning_ratios: tuple[float, ...]
    amplitude_ratios: tuple[float, ...]
    bound: float

    @property
    def worst_detuning_ratio(self) -> float:
        return max(self.detuning_ratios, default=0.0)

    @property
    def worst_amplitude_ratio(self) -> float:
        return max(self.amplitude_ratios, default=0.0)

    @property
    def worst_ratio(self) -> float:
        return max(self.worst_detuning_ratio, self.worst_amplitude_ratio)

    @property
    def passed(self) -> bool:
        return self.worst_ratio < self.bound

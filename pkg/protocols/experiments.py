"""Experiment protocols: random instances, sweeps and the Rydberg scenario."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import StrEnum

import numpy as np

from pulseman.exceptions import ControlError
from pulseman.protocols.control import SimplexConfig, TransferSolution
from pulseman.protocols.dynamics import StateVector
from pulseman.protocols.system import DriveSet, Edge, LevelSystem

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RandomInstanceSpec:
    """
    Recipe for one random transfer instance.

    Energies are drawn uniformly in `energy_range` (default [0, N]); trees
    are uniform over labelled trees; goals are uniform on the complex unit
    sphere. In strict mode the gap condition covers every level pair.
    """

    dimension: int
    seed: int | np.random.SeedSequence | None = None
    detuning: float = 0.0
    energy_range: tuple[float, float] | None = None
    min_gap: float = 0.1
    strict: bool = False
    max_attempts: int = 10_000
    amplitude_fraction: float = 0.01

    def __post_init__(self):
        if self.dimension < 2:
            raise ControlError("INVALID_CONFIG", message="dimension must be at least 2")
        if not self.min_gap > 0:
            raise ControlError("INVALID_CONFIG", message="min_gap must be positive")
        if self.max_attempts < 1:
            raise ControlError("INVALID_CONFIG", message="max_attempts must be positive")
        low, high = self.bounds
        if not high > low:
            raise ControlError("INVALID_CONFIG", message="energy_range must be increasing")

    @property
    def bounds(self) -> tuple[float, float]:
        if self.energy_range is None:
            return (0.0, float(self.dimension))
        return (float(self.energy_range[0]), float(self.energy_range[1]))


@dataclass(frozen=True, eq=False)
class RandomInstance:
    """A drawn level system with its drives, tree and goal."""

    system: LevelSystem
    drives: DriveSet
    initial: StateVector
    goal: StateVector
    detuning: float
    amplitude_bound: float
    seed: int | None = None


@dataclass(frozen=True)
class SweepConfig:
    """Grid of (dimension, detuning) cells, each with `goals_per_cell` random goals."""

    dimensions: tuple[int, ...] = (2, 3, 4, 5, 6)
    detunings: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)
    goals_per_cell: int = 50
    threshold: float = 1e-3
    master_seed: int = 0
    workers: int = 1
    min_gap: float = 0.1
    amplitude_fraction: float = 0.01
    attempts: int = 8
    propagation_tol: float = 1e-12
    simplex: SimplexConfig = field(default_factory=SimplexConfig)

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(int(n) for n in self.dimensions))
        object.__setattr__(self, "detunings", tuple(float(d) for d in self.detunings))
        if not self.dimensions or any(n < 2 for n in self.dimensions):
            raise ControlError("INVALID_CONFIG", message="dimensions must be >= 2")
        if not self.detunings or any(not d > 0 for d in self.detunings):
            raise ControlError("INVALID_CONFIG", message="detunings must be positive")
        if self.goals_per_cell < 1:
            raise ControlError("INVALID_CONFIG", message="goals_per_cell must be >= 1")
        if self.workers < 1:
            raise ControlError("INVALID_CONFIG", message="workers must be >= 1")
        if not self.threshold > 0:
            raise ControlError("INVALID_CONFIG", message="threshold must be positive")

    def evolve(self, **changes) -> SweepConfig:
        return replace(self, **changes)


class BlockadeMode(StrEnum):
    """`perfect` keeps only the transitions each laser is listed on; `finite` adds the U-detuned partners."""

    PERFECT = "perfect"
    FINITE = "finite"


RYDBERG_LABELS: tuple[str, ...] = ("00", "01", "0r", "10", "11", "1r", "r0", "r1", "rr")


@dataclass(frozen=True)
class RydbergScenario:
    """
    Two-atom Rydberg scheme with eight lasers.

    Units are rad/us for rabi frequencies, detunings and blockade (so a
    value of 2*pi*1.0 is 1 MHz) and microseconds for the duration.
    Lasers are numbered 1..8; `active` lists the ones switched on.
    """

    rabi: tuple[float, ...] = (0.0,) * 8
    phases: tuple[float, ...] = (0.0,) * 8
    detunings: tuple[float, ...] = (0.0,) * 5
    blockade: float = TWO_PI * 20.0
    active: frozenset[int] = frozenset(range(1, 9))
    mode: BlockadeMode = BlockadeMode.PERFECT
    duration: float = 0.314

    def __post_init__(self):
        object.__setattr__(self, "rabi", tuple(float(r) for r in self.rabi))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "detunings", tuple(float(d) for d in self.detunings))
        object.__setattr__(self, "active", frozenset(int(i) for i in self.active))
        object.__setattr__(self, "mode", BlockadeMode(self.mode))
        if len(self.rabi) != 8 or len(self.phases) != 8:
            raise ControlError("INVALID_CONFIG", message="Need eight rabi frequencies and phases")
        if len(self.detunings) != 5:
            raise ControlError("INVALID_CONFIG", message="Need five detunings")
        if not self.active <= set(range(1, 9)):
            raise ControlError("INVALID_CONFIG", message="Lasers are numbered 1..8")
        if self.duration < 0:
            raise ControlError("INVALID_CONFIG", message="duration must be nonnegative")

    @classmethod
    def published(cls, mode: BlockadeMode | str = BlockadeMode.PERFECT, blockade: float = TWO_PI * 20.0):
        """Lasers 1, 4, 5 and 8 at 1, 1, 3.2 and 1.3 MHz for 314 ns, with delta_5 = -U."""
        rabi = [0.0] * 8
        rabi[0] = TWO_PI * 1.0
        rabi[3] = TWO_PI * 1.0
        rabi[4] = TWO_PI * 3.2
        rabi[7] = TWO_PI * 1.3
        return cls(
            rabi=tuple(rabi),
            detunings=(0.0, 0.0, 0.0, 0.0, -blockade),
            blockade=blockade,
            active=frozenset({1, 4, 5, 8}),
            mode=mode,
            duration=0.314,
        )

    def with_blockade(self, blockade: float) -> RydbergScenario:
        """Change U while keeping delta_5 = -U."""
        detunings = self.detunings[:4] + (-blockade,)
        return replace(self, blockade=blockade, detunings=detunings)

    def with_lasers(self, rabi: dict[int, float], phases: dict[int, float] | None = None, duration=None):
        new_rabi = list(self.rabi)
        new_phases = list(self.phases)
        for laser, value in rabi.items():
            new_rabi[laser - 1] = float(value)
        for laser, value in (phases or {}).items():
            new_phases[laser - 1] = float(value)
        return replace(
            self,
            rabi=tuple(new_rabi),
            phases=tuple(new_phases),
            duration=self.duration if duration is None else float(duration),
        )

    def evolve(self, **changes) -> RydbergScenario:
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class RydbergModel:
    """
    Built Rydberg Hamiltonian.

    `system` carries the rotating-frame diagonal as energies and the active
    couplings, for graph analysis. `hamiltonian` is the time-independent
    part; `partners` lists (laser, upper, lower, rate) terms that rotate as
    exp(i rate t) and only appear in finite-blockade mode.
    """

    scenario: RydbergScenario
    system: LevelSystem
    hamiltonian: np.ndarray
    lasers: dict[int, tuple[Edge, ...]]
    partners: tuple[tuple[int, int, int, float], ...] = ()

    @property
    def labels(self) -> tuple[str, ...]:
        return RYDBERG_LABELS

    def index(self, label: str) -> int:
        return RYDBERG_LABELS.index(label)

    def basis(self, label: str) -> np.ndarray:
        vec = np.zeros(len(RYDBERG_LABELS), dtype=complex)
        vec[self.index(label)] = 1.0
        return vec


@dataclass(frozen=True)
class RydbergReport:
    """Outcome of the Bell-state transfer plus controllability diagnostics."""

    mode: BlockadeMode
    infidelity: float
    solution: TransferSolution
    components: tuple[tuple[str, ...], ...]
    cycles: tuple[tuple[str, ...], ...]
    shared_lasers: tuple[int, ...]
    reoptimized: bool = False
    printed_infidelity: float | None = None
    blockade_scan: tuple[tuple[float, float], ...] = ()

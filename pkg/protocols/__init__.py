"""Pulseman protocols."""

from pulseman.protocols.control import (
    ControlSolution,
    SimplexConfig,
    SimplexResult,
    StarGoal,
    TransferProblem,
    TransferSolution,
    TwoLevelGoal,
)
from pulseman.protocols.dynamics import Frame, PropagationResult, StateVector
from pulseman.protocols.experiments import (
    BlockadeMode,
    RandomInstance,
    RandomInstanceSpec,
    RydbergModel,
    RydbergReport,
    RydbergScenario,
    SweepConfig,
)
from pulseman.protocols.propagator import ExactPropagator
from pulseman.protocols.system import (
    Coupling,
    CycleReport,
    DegeneracyReport,
    DriveField,
    DriveSet,
    EffectiveGenerator,
    GammaAssignment,
    LevelGraph,
    LevelSystem,
    PruneOrder,
    RwaValidityReport,
)

__all__ = [
    "BlockadeMode",
    "ControlSolution",
    "Coupling",
    "CycleReport",
    "DegeneracyReport",
    "DriveField",
    "DriveSet",
    "EffectiveGenerator",
    "ExactPropagator",
    "Frame",
    "GammaAssignment",
    "LevelGraph",
    "LevelSystem",
    "PropagationResult",
    "PruneOrder",
    "RandomInstance",
    "RandomInstanceSpec",
    "RwaValidityReport",
    "RydbergModel",
    "RydbergReport",
    "RydbergScenario",
    "SimplexConfig",
    "SimplexResult",
    "StarGoal",
    "StateVector",
    "SweepConfig",
    "TransferProblem",
    "TransferSolution",
    "TwoLevelGoal",
]

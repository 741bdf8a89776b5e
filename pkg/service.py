"""
Pulseman public API.

CORE (essential):
    ControlService.analyze(system)           - Graph, degeneracy, gamma and RWA validity report
    ControlService.solve(system, freqs, goal) - Closed-form or optimized pulse
    ControlService.double_check(problem, sol) - Re-simulate with the full Hamiltonian

EXPERIMENTS:
    ControlService.sweep(config)   - Success fractions over (dimension, detuning)
    ControlService.rydberg()       - Two-atom Bell-state transfer
"""

from __future__ import annotations

import logging
import threading
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any

import pandas as pd

from pulseman import graph as level_graph
from pulseman import optimize, rwa
from pulseman.conf import get_propagator, pulseman_settings
from pulseman.exceptions import ControlError
from pulseman.experiments.rydberg import rydberg_bell_transfer
from pulseman.experiments.sweep import SweepTable, run_sweep
from pulseman.protocols.control import SimplexConfig, TransferProblem, TransferSolution
from pulseman.protocols.dynamics import StateVector
from pulseman.protocols.experiments import BlockadeMode, RydbergReport, RydbergScenario, SweepConfig
from pulseman.protocols.system import (
    CycleReport,
    DegeneracyReport,
    DriveSet,
    GammaAssignment,
    LevelGraph,
    LevelSystem,
    PruneOrder,
    RwaValidityReport,
)
from pulseman.serializers import jsonable

if TYPE_CHECKING:
    from pulseman.models import SweepRun

logger = logging.getLogger(__name__)

SOLVE_METHODS = ("auto", "analytic", "nelder-mead")


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    """Everything `analyze` can say about a level scheme and its drives."""

    system: LevelSystem
    graph: LevelGraph
    degeneracy: DegeneracyReport
    star_center: int | None = None
    prune: PruneOrder | None = None
    drives: DriveSet | None = None
    gamma: GammaAssignment | None = None
    cycles: CycleReport | None = None
    validity: RwaValidityReport | None = None

    @property
    def time_independent(self) -> bool | None:
        """True when a frame makes the RWA Hamiltonian constant; None without drives."""
        if self.drives is None:
            return None
        return self.gamma is not None

    def as_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "dimension": self.system.dimension,
            "edges": [list(e) for e in self.graph.edges],
            "connected": self.graph.connected,
            "acyclic": self.graph.acyclic,
            "tree": self.graph.is_tree,
            "star_center": self.star_center,
            "nondegenerate": self.degeneracy.valid,
            "degenerate_pairs": [[list(a), list(b), gap] for a, b, gap in self.degeneracy.violations],
            "prune_order": [list(r) for r in self.prune] if self.prune is not None else None,
            "root": self.prune.root if self.prune is not None else None,
            "time_independent": self.time_independent,
        }
        if self.drives is not None:
            data["assignment"] = [list(e) for e in self.drives.assignment]
        if self.gamma is not None:
            data["gamma"] = list(self.gamma.gamma)
            data["max_relative_residual"] = self.gamma.max_relative_residual
        if self.cycles is not None:
            data["cycles"] = [{"cycle": list(c), "detuning_sum": s} for c, s in self.cycles.cycles]
            data["reducible"] = self.cycles.reducible
        if self.validity is not None:
            data["rwa_validity"] = {
                "detuning_ratios": list(self.validity.detuning_ratios),
                "amplitude_ratios": list(self.validity.amplitude_ratios),
                "bound": self.validity.bound,
                "passed": self.validity.passed,
            }
        return data


class ControlService:
    """
    Pulseman public API.

    Uses @classmethod for extensibility. Defaults (tolerances, thresholds,
    simplex settings, propagator backend) come from PULSEMAN settings.
    """

    # ======================================================================
    # CORE API
    # ======================================================================

    @classmethod
    def analyze(
        cls,
        system: LevelSystem,
        drives: DriveSet | None = None,
        frequencies: list[float] | None = None,
    ) -> AnalysisReport:
        """
        Structural report on a level scheme.

        With `drives` (or bare `frequencies`, matched by resonance) the
        report also holds the frame weights, or the cycle sums when the
        graph has cycles, and the RWA validity ratios.

        Raises:
            ControlError: INVALID_SYSTEM, or any field assignment error.
        """
        if drives is None and frequencies is not None:
            drives = cls.assign(system, frequencies)

        structure = rwa.driven_system(system, drives) if drives is not None and pulseman_settings.SPARSE_DRIVE else system
        graph = level_graph.build_graph(structure)
        degeneracy = level_graph.check_nondegenerate(
            system,
            gap_tol=pulseman_settings.GAP_TOL,
            strict=pulseman_settings.STRICT_NONDEGENERACY,
        )
        report = {
            "system": system,
            "graph": graph,
            "degeneracy": degeneracy,
            "star_center": level_graph.is_star(graph),
            "prune": level_graph.prune_order(graph) if graph.is_tree else None,
        }
        if drives is None:
            return AnalysisReport(**report)

        detunings = rwa.oriented_detunings(system, drives)
        report["drives"] = drives
        report["validity"] = rwa.check_validity(system, drives, bound=pulseman_settings.RWA_RATIO_BOUND)
        if graph.is_tree:
            report["gamma"] = level_graph.assign_gamma(graph, detunings)
        elif graph.connected:
            cycles = level_graph.check_cycle_consistency(graph, detunings)
            report["cycles"] = cycles
            report["gamma"] = cycles.gamma
        return AnalysisReport(**report)

    @classmethod
    def assign(cls, system: LevelSystem, frequencies: list[float], amplitudes=None) -> DriveSet:
        """Match frequencies to transitions with the configured resonance window."""
        window = rwa.default_window(system, factor=pulseman_settings.RESONANCE_WINDOW_FACTOR)
        return rwa.assign_fields(system, frequencies, window=window, amplitudes=amplitudes)

    @classmethod
    def problem(
        cls,
        system: LevelSystem,
        frequencies: list[float],
        goal: StateVector,
        initial: StateVector | None = None,
        amplitude_bound: float | None = None,
        threshold: float | None = None,
    ) -> TransferProblem:
        """Transfer problem with fields assigned by resonance; initial defaults to level 0."""
        drives = cls.assign(system, frequencies)
        return TransferProblem(
            system,
            drives,
            initial if initial is not None else StateVector.basis(system.dimension, 0),
            goal,
            threshold=threshold if threshold is not None else pulseman_settings.INFIDELITY_THRESHOLD,
            amplitude_bound=amplitude_bound,
        )

    @classmethod
    def solve(
        cls,
        system: LevelSystem,
        frequencies: list[float],
        goal: StateVector,
        initial: StateVector | None = None,
        method: str = "auto",
        seed: int | None = None,
        amplitude_bound: float | None = None,
    ) -> TransferSolution:
        """
        Pulse steering `initial` to `goal` in the RWA model.

        Args:
            method: "analytic" (stars only), "nelder-mead" (no closed-form
                seed) or "auto" (closed form when available, else search)

        Raises:
            ControlError: INCONSISTENT_GOAL for "analytic" on a non-star,
                INVALID_CONFIG for an unknown method.
        """
        problem = cls.problem(system, frequencies, goal, initial, amplitude_bound)
        return cls.solve_problem(problem, method=method, seed=seed)

    @classmethod
    def solve_problem(
        cls,
        problem: TransferProblem,
        method: str = "auto",
        seed: int | None = None,
        config: SimplexConfig | None = None,
    ) -> TransferSolution:
        if method not in SOLVE_METHODS:
            raise ControlError("INVALID_CONFIG", message=f"Unknown method {method!r}", choices=list(SOLVE_METHODS))
        if method == "analytic":
            solution = optimize.analytic_transfer(problem, seed=seed)
        else:
            solution = optimize.optimize_transfer(
                problem,
                config or pulseman_settings.simplex_config(),
                seed=seed,
                analytic_seed=method == "auto",
            )

        from pulseman.signals import transfer_solved

        transfer_solved.send(sender=cls, problem=problem, solution=solution)
        return solution

    @classmethod
    def double_check(
        cls,
        problem: TransferProblem,
        solution: TransferSolution,
        tol: float | None = None,
        stop: threading.Event | None = None,
    ) -> TransferSolution:
        """Fill `exact_infidelity` with the configured ExactPropagator."""
        return optimize.double_check(
            problem,
            solution,
            tol=tol if tol is not None else pulseman_settings.PROPAGATION_TOL,
            propagator=get_propagator(),
            stop=stop,
        )

    # ======================================================================
    # EXPERIMENTS
    # ======================================================================

    @classmethod
    def sweep_config(cls, data: dict[str, Any] | None = None, **overrides) -> SweepConfig:
        """SweepConfig from a JSON-like dict, falling back to PULSEMAN settings."""
        data = dict(data or {})
        data.update({k: v for k, v in overrides.items() if v is not None})
        simplex = pulseman_settings.simplex_config()
        if "simplex" in data:
            simplex = SimplexConfig.from_dict({**asdict(simplex), **data.pop("simplex")})
        data.setdefault("workers", pulseman_settings.SWEEP_WORKERS)
        data.setdefault("threshold", pulseman_settings.INFIDELITY_THRESHOLD)
        data.setdefault("propagation_tol", pulseman_settings.PROPAGATION_TOL)
        try:
            return SweepConfig(simplex=simplex, **data)
        except TypeError as exc:
            raise ControlError("INVALID_CONFIG", message=str(exc)) from exc

    @classmethod
    def sweep(
        cls,
        config: SweepConfig,
        persist: bool = False,
        out_dir: Path | str | None = None,
        code: str | None = None,
        stop: threading.Event | None = None,
    ) -> SweepTable:
        """
        Run a sweep; with `persist` the run and its rows are stored.

        Persisted runs end in status "done" or "failed"; `sweep_completed`
        is sent once the rows are saved.
        """
        if not persist:
            return run_sweep(config, out_dir=out_dir, stop=stop)

        from pulseman.models import SweepRun, SweepStatus

        run = SweepRun.objects.create(
            code=code or f"sweep-{SweepRun.objects.count() + 1}",
            config=jsonable(asdict(config)),
            master_seed=config.master_seed,
            status=SweepStatus.RUNNING,
        )
        try:
            table = run_sweep(config, out_dir=out_dir, stop=stop)
        except Exception as exc:
            run.status = SweepStatus.FAILED
            run.error = str(exc)
            run.save(update_fields=["status", "error", "updated_at"])
            raise

        cls._store_results(run, table)
        return table

    @classmethod
    def _store_results(cls, run: SweepRun, table: SweepTable) -> None:
        from pulseman.models import SweepResult, SweepStatus
        from pulseman.signals import sweep_completed

        def value(row, key):
            item = row[key]
            if item is None or pd.isna(item):
                return None
            return item.item() if hasattr(item, "item") else item

        SweepResult.objects.bulk_create(
            [
                SweepResult(
                    run=run,
                    dimension=int(row["dimension"]),
                    detuning=float(row["detuning"]),
                    goal_index=int(row["goal_index"]),
                    seed=int(row["seed"]),
                    distance=value(row, "distance"),
                    rwa_infidelity=value(row, "rwa_infidelity"),
                    exact_infidelity=value(row, "exact_infidelity"),
                    rwa_success=value(row, "rwa_success"),
                    exact_success=value(row, "exact_success"),
                    duration=value(row, "duration"),
                    evaluations=value(row, "evaluations"),
                    method=value(row, "method") or "",
                    error=value(row, "error") or "",
                )
                for row in table.rows.astype(object).to_dict(orient="records")
            ]
        )
        run.summary = jsonable(table.summary.to_dict(orient="records"))
        run.status = SweepStatus.DONE
        run.save(update_fields=["summary", "status", "updated_at"])
        logger.info("Sweep %s stored: %d rows", run.code, len(table.rows))
        sweep_completed.send(sender=run.__class__, instance=run, errors=table.error_count)

    @classmethod
    def rydberg(
        cls,
        finite_blockade: bool = False,
        reoptimize: bool | None = None,
        seed: int | None = 0,
        config: SimplexConfig | None = None,
        blockade: float | None = None,
        stop: threading.Event | None = None,
        **overrides,
    ) -> RydbergReport:
        """
        Bell-state transfer of two Rydberg atoms from the published pulses.

        `overrides` replace RydbergScenario fields (duration, rabi, ...).
        Finite-blockade runs reoptimize unless `reoptimize` is False.
        """
        mode = BlockadeMode.FINITE if finite_blockade else BlockadeMode.PERFECT
        scenario = RydbergScenario.published(mode)
        if blockade is not None:
            scenario = scenario.with_blockade(blockade)
        if overrides:
            try:
                scenario = scenario.evolve(**overrides)
            except TypeError as exc:
                raise ControlError("INVALID_CONFIG", message=str(exc)) from exc
        return rydberg_bell_transfer(scenario, reoptimize=reoptimize, config=config, seed=seed, stop=stop)


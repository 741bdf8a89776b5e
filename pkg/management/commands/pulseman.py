"""
Pulseman command line.

    manage.py pulseman analyze system.json
    manage.py pulseman solve system.json goal.json [--method auto] [--double-check]
    manage.py pulseman double-check solution.json
    manage.py pulseman sweep --config sweep.json [--threads 8] [--out dir] [--strict] [--persist]
    manage.py pulseman rydberg [--finite-blockade] [--reoptimize | --no-reoptimize]

`system.json` holds a level system and optionally its drives:
{"energies", "couplings", "frequencies" | "drives" | "detuning", "amplitude_bound"}.
Results are written to stdout as JSON.
"""

import argparse
import json
import math
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from pulseman import dynamics, serializers
from pulseman.conf import pulseman_settings
from pulseman.exceptions import ControlError
from pulseman.optimize import rwa_final_state
from pulseman.protocols.control import TransferProblem
from pulseman.protocols.dynamics import StateVector
from pulseman.service import ControlService


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CommandError(f"Cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CommandError(f"{path} is not valid JSON: {exc}") from exc


class Command(BaseCommand):
    help = "Analyze level schemes, solve and double-check transfers, run sweeps and the Rydberg scenario."

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest="action", required=True)

        analyze = sub.add_parser("analyze", help="Graph, degeneracy, gamma and RWA validity report")
        analyze.add_argument("system")

        solve = sub.add_parser("solve", help="Closed-form or optimized transfer pulse")
        solve.add_argument("system")
        solve.add_argument("goal")
        solve.add_argument("--method", choices=["auto", "analytic", "nelder-mead"], default="auto")
        solve.add_argument("--double-check", action="store_true", help="Also run the exact propagation")

        check = sub.add_parser("double-check", help="Re-simulate a solution with the full Hamiltonian")
        check.add_argument("solution")

        sweep = sub.add_parser("sweep", help="Success fractions over dimensions and detunings")
        sweep.add_argument("--config", help="Sweep configuration JSON")
        sweep.add_argument("--threads", type=int, help="Worker processes")
        sweep.add_argument("--out", help="Output directory (default: PULSEMAN['OUTPUT_DIR'])")
        sweep.add_argument("--strict", action="store_true", help="Fail when any cell errored")
        sweep.add_argument("--persist", action="store_true", help="Store the run in the database")
        sweep.add_argument("--code", help="SweepRun code when persisting")

        rydberg = sub.add_parser("rydberg", help="Two-atom Bell-state transfer")
        rydberg.add_argument("--finite-blockade", action="store_true")
        rydberg.add_argument("--reoptimize", action=argparse.BooleanOptionalAction, default=None)
        rydberg.add_argument("--blockade", type=float, help="Blockade shift U in rad/us")

        for p in (solve, sweep, rydberg):
            p.add_argument("--seed", type=int)
        for p in (solve, check, sweep):
            p.add_argument("--eps", type=float, help="Success threshold on the infidelity")

    def handle(self, *args, **options):
        action = options["action"].replace("-", "_")
        try:
            payload = getattr(self, f"handle_{action}")(options)
        except ControlError as exc:
            raise CommandError(f"[{exc.code}] {exc.message}") from exc
        self.stdout.write(json.dumps(serializers.jsonable(payload), indent=2))

    # ======================================================================
    # SUBCOMMANDS
    # ======================================================================

    def handle_analyze(self, options):
        data = _load(options["system"])
        system = serializers.system_from_dict(data)
        drives = serializers.drives_from_dict(data["drives"], system) if "drives" in data else None
        report = ControlService.analyze(system, drives=drives, frequencies=data.get("frequencies"))
        return report.as_dict()

    def _problem(self, data, goal: StateVector, eps: float | None) -> TransferProblem:
        system = serializers.system_from_dict(data)
        threshold = eps if eps is not None else pulseman_settings.INFIDELITY_THRESHOLD
        bound = data.get("amplitude_bound")
        initial = serializers.state_from_dict(data["initial"], system.dimension) if "initial" in data else None
        if "frequencies" in data:
            return ControlService.problem(system, data["frequencies"], goal, initial, bound, threshold)
        if "drives" in data:
            drives = serializers.drives_from_dict(data["drives"], system)
            initial = initial or StateVector.basis(system.dimension, 0)
            return TransferProblem(system, drives, initial, goal, threshold=threshold, amplitude_bound=bound)
        return TransferProblem.from_detuning(
            system, float(data.get("detuning", 0.0)), goal, initial, threshold=threshold, amplitude_bound=bound
        )

    def handle_solve(self, options):
        data = _load(options["system"])
        dimension = len(data.get("energies", []))
        goal = serializers.state_from_dict(_load(options["goal"]), dimension)
        problem = self._problem(data, goal, options.get("eps"))
        solution = ControlService.solve_problem(problem, method=options["method"], seed=options.get("seed"))
        if options["double_check"]:
            solution = ControlService.double_check(problem, solution)
        return serializers.solution_to_dict(solution, problem)

    def handle_double_check(self, options):
        data = _load(options["solution"])
        if "problem" not in data:
            raise CommandError("Solution file has no 'problem'; write it with 'pulseman solve'")
        problem = serializers.problem_from_dict(data["problem"])
        if options.get("eps") is not None:
            problem = TransferProblem(
                problem.system, problem.drives, problem.initial, problem.goal, options["eps"], problem.amplitude_bound
            )
        solution = serializers.solution_from_dict(data).evolve(threshold=problem.threshold)
        if math.isnan(solution.rwa_infidelity):
            reached = rwa_final_state(problem, solution)
            solution = solution.evolve(rwa_infidelity=dynamics.infidelity(problem.goal.at(solution.duration), reached))
        solution = ControlService.double_check(problem, solution)
        return serializers.solution_to_dict(solution, problem)

    def handle_sweep(self, options):
        data = _load(options["config"]) if options.get("config") else {}
        config = ControlService.sweep_config(
            data,
            workers=options.get("threads"),
            master_seed=options.get("seed"),
            threshold=options.get("eps"),
        )
        out_dir = Path(options.get("out") or pulseman_settings.OUTPUT_DIR)
        table = ControlService.sweep(config, persist=options["persist"], out_dir=out_dir, code=options.get("code"))
        self.stderr.write(f"Wrote {table.paths.get('csv')} and {table.paths.get('summary')}")
        if options["strict"] and table.error_count:
            raise CommandError(f"{table.error_count} sweep cells failed")
        return {"cells": table.summary.to_dict(orient="records"), "errors": table.error_count}

    def handle_rydberg(self, options):
        seed = options.get("seed")
        report = ControlService.rydberg(
            finite_blockade=options["finite_blockade"],
            reoptimize=options["reoptimize"],
            seed=0 if seed is None else seed,
            blockade=options.get("blockade"),
        )
        return serializers.rydberg_report_to_dict(report)

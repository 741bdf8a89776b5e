"""
Detuning sweeps.

Every (dimension, detuning) cell holds `goals_per_cell` independent random
instances. Each is optimized in the RWA model and double-checked with the
exact propagator. Cells run in a process pool; rows are sorted before they
are written, so output does not depend on scheduling.
"""

from __future__ import annotations

import json
import logging
import math
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from pulseman import dynamics
from pulseman.exceptions import ControlError
from pulseman.experiments.instances import instance_seed, random_instance
from pulseman.optimize import double_check, optimize_transfer
from pulseman.protocols.control import TransferProblem
from pulseman.protocols.experiments import RandomInstanceSpec, SweepConfig

logger = logging.getLogger(__name__)

COLUMNS = [
    "dimension",
    "detuning",
    "goal_index",
    "seed",
    "distance",
    "rwa_infidelity",
    "exact_infidelity",
    "rwa_success",
    "exact_success",
    "confirmed",
    "duration",
    "evaluations",
    "exact_steps",
    "method",
    "error",
]


@dataclass(frozen=True, eq=False)
class SweepTable:
    """Per-goal rows plus the per-cell success summary."""

    rows: pd.DataFrame
    summary: pd.DataFrame
    paths: dict[str, Path] = field(default_factory=dict)

    @property
    def error_count(self) -> int:
        return int(self.rows["error"].fillna("").astype(bool).sum())


def _tasks(config: SweepConfig) -> list[tuple[int, float, int, int]]:
    return [
        (n, delta, g, instance_seed(config.master_seed, n, delta, g))
        for n in config.dimensions
        for delta in config.detunings
        for g in range(config.goals_per_cell)
    ]


def run_cell(config: SweepConfig, task: tuple[int, float, int, int]) -> dict[str, Any]:
    """Optimize and double-check one random instance; failures become tagged rows."""
    n, delta, index, seed = task
    row: dict[str, Any] = dict.fromkeys(COLUMNS)
    row.update(dimension=n, detuning=delta, goal_index=index, seed=seed, error="")
    try:
        instance = random_instance(
            RandomInstanceSpec(
                dimension=n,
                seed=seed,
                detuning=delta,
                min_gap=config.min_gap,
                amplitude_fraction=config.amplitude_fraction,
            )
        )
        row["distance"] = dynamics.hilbert_distance(instance.goal, instance.initial)
        problem = TransferProblem(
            instance.system,
            instance.drives,
            instance.initial,
            instance.goal,
            threshold=config.threshold,
            amplitude_bound=instance.amplitude_bound,
        )
        solution = optimize_transfer(problem, config.simplex, seed=seed, attempts=config.attempts)
        row.update(
            rwa_infidelity=solution.rwa_infidelity,
            rwa_success=solution.rwa_success,
            duration=solution.duration,
            evaluations=solution.evaluations,
            method=solution.method,
        )
        solution = double_check(problem, solution, tol=config.propagation_tol)
        row.update(
            exact_infidelity=solution.exact_infidelity,
            exact_success=solution.exact_success,
            confirmed=bool(solution.rwa_success and solution.exact_success),
            exact_steps=solution.exact_steps,
        )
    except ControlError as exc:
        row["error"] = exc.code
        logger.warning("Sweep cell N=%d delta=%g #%d failed: %s", n, delta, index, exc)
    except Exception as exc:  # noqa: BLE001
        row["error"] = type(exc).__name__
        logger.exception("Sweep cell N=%d delta=%g #%d crashed", n, delta, index)
    return row


def _rows_frame(rows: list[dict[str, Any]]) -> pd.DataFrame:
    frame = pd.DataFrame(rows, columns=COLUMNS)
    for column in ("rwa_success", "exact_success", "confirmed"):
        frame[column] = frame[column].astype("boolean")
    frame = frame.sort_values(["dimension", "detuning", "seed"], kind="stable").reset_index(drop=True)
    return frame


def summarize(rows: pd.DataFrame) -> pd.DataFrame:
    """
    Success fractions per (dimension, detuning).

    Error rows count as failures. `lambda_exact` counts double checks that
    confirm a successful RWA optimization, so it never exceeds `lambda_rwa`.
    """
    records = []
    for (n, delta), cell in rows.groupby(["dimension", "detuning"], sort=True):
        total = len(cell)
        rwa_hits = int(cell["rwa_success"].fillna(False).astype(bool).sum())
        exact_hits = int(cell["confirmed"].fillna(False).astype(bool).sum())
        p_rwa = rwa_hits / total
        p_exact = exact_hits / total
        records.append(
            {
                "dimension": int(n),
                "detuning": float(delta),
                "goals": total,
                "errors": int(cell["error"].fillna("").astype(bool).sum()),
                "lambda_rwa": p_rwa,
                "lambda_rwa_err": math.sqrt(p_rwa * (1 - p_rwa) / total),
                "lambda_exact": p_exact,
                "lambda_exact_err": math.sqrt(p_exact * (1 - p_exact) / total),
                "median_rwa_infidelity": float(np.nanmedian(cell["rwa_infidelity"].astype(float)))
                if cell["rwa_infidelity"].notna().any()
                else math.nan,
            }
        )
    return pd.DataFrame.from_records(records)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")


def write_outputs(table: SweepTable, config: SweepConfig, out_dir: Path | str) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sweep.csv"
    json_path = out / "summary.json"
    table.rows.to_csv(csv_path, index=False, float_format="%.17g")
    payload = {
        "config": asdict(config),
        "cells": table.summary.to_dict(orient="records"),
        "errors": table.error_count,
    }
    json_path.write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")
    return {"csv": csv_path, "summary": json_path}


def run_sweep(
    config: SweepConfig,
    out_dir: Path | str | None = None,
    stop: threading.Event | None = None,
) -> SweepTable:
    """
    Run every cell of the sweep, in parallel when `config.workers > 1`.

    Rows are canonicalized by (dimension, detuning, seed); outputs are
    written to `out_dir` when given. `stop` is honoured between cells in
    sequential mode and between result batches in parallel mode.
    """
    tasks = _tasks(config)
    logger.info("Sweep: %d cells, %d workers", len(tasks), config.workers)

    rows: list[dict[str, Any]] = []
    if config.workers > 1:
        chunksize = max(1, len(tasks) // (8 * config.workers))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for row in pool.map(run_cell, [config] * len(tasks), tasks, chunksize=chunksize):
                rows.append(row)
                if stop is not None and stop.is_set():
                    pool.shutdown(wait=False, cancel_futures=True)
                    raise ControlError("CANCELLED", completed=len(rows))
    else:
        for task in tasks:
            if stop is not None and stop.is_set():
                raise ControlError("CANCELLED", completed=len(rows))
            rows.append(run_cell(config, task))

    frame = _rows_frame(rows)
    table = SweepTable(rows=frame, summary=summarize(frame))
    if out_dir is not None:
        table = SweepTable(rows=table.rows, summary=table.summary, paths=write_outputs(table, config, out_dir))
    if table.error_count:
        logger.warning("Sweep finished with %d error rows", table.error_count)
    logger.info("Sweep finished: %d rows", len(frame))
    return table

"""
JSON payloads <-> protocol dataclasses.

Schemas:
    system:   {"energies": [...], "couplings": [{"k", "j", "re", "im"}, ...]}
    drives:   {"fields": [{"re", "im", "omega"}, ...], "assignment": [[f, k, j], ...]}
              (assignment optional; fields are then matched by resonance)
    state:    {"amplitudes": [[re, im], ...]} or {"re": [...], "im": [...]}
    problem:  {"system", "drives" | "detuning", "initial"?, "goal", "threshold"?, "amplitude_bound"?}
    solution: {"amplitudes", "phases", "duration", "rwa_infidelity", ...}
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from typing import Any

import numpy as np

from pulseman import rwa
from pulseman.exceptions import ControlError
from pulseman.protocols.control import TransferProblem, TransferSolution
from pulseman.protocols.dynamics import StateVector
from pulseman.protocols.experiments import RydbergReport
from pulseman.protocols.system import Coupling, DriveField, DriveSet, LevelSystem


def _require(data: Any, key: str, where: str):
    if not isinstance(data, Mapping):
        raise ControlError("INVALID_PAYLOAD", message=f"{where} must be an object")
    if key not in data:
        raise ControlError("INVALID_PAYLOAD", message=f"{where} is missing '{key}'")
    return data[key]


def _float(value: Any, where: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ControlError("INVALID_PAYLOAD", message=f"{where} must be a number") from exc


def _optional_float(value: Any) -> float | None:
    return None if value is None else float(value)


def _finite(value: float | None) -> float | None:
    # JSON has no NaN/inf.
    if value is None or not math.isfinite(value):
        return None
    return float(value)


# =============================================================================
# LEVEL SYSTEM AND DRIVES
# =============================================================================


def system_from_dict(data: Mapping[str, Any]) -> LevelSystem:
    energies = _require(data, "energies", "system")
    if not isinstance(energies, list):
        raise ControlError("INVALID_PAYLOAD", message="system.energies must be a list")
    couplings = []
    for i, entry in enumerate(data.get("couplings", [])):
        where = f"system.couplings[{i}]"
        k = _require(entry, "k", where)
        j = _require(entry, "j", where)
        if not isinstance(k, int) or not isinstance(j, int):
            raise ControlError("INVALID_PAYLOAD", message=f"{where} indices must be integers")
        value = complex(_float(entry.get("re", 1.0), where), _float(entry.get("im", 0.0), where))
        couplings.append(Coupling(k, j, value))
    return LevelSystem(tuple(_float(e, "system.energies") for e in energies), tuple(couplings))


def system_to_dict(system: LevelSystem) -> dict[str, Any]:
    return {
        "energies": list(system.energies),
        "couplings": [
            {"k": c.k, "j": c.j, "re": complex(c.value).real, "im": complex(c.value).imag} for c in system.couplings
        ],
    }


def drives_from_dict(data: Mapping[str, Any], system: LevelSystem, window: float | None = None) -> DriveSet:
    """Build a DriveSet; without an explicit assignment the fields are matched to transitions."""
    entries = _require(data, "fields", "drives")
    fields = []
    for i, entry in enumerate(entries):
        where = f"drives.fields[{i}]"
        amplitude = complex(_float(entry.get("re", 0.0), where), _float(entry.get("im", 0.0), where))
        fields.append(DriveField(amplitude, _float(_require(entry, "omega", where), where)))

    assignment = data.get("assignment")
    if assignment is None:
        return rwa.assign_fields(
            system, [f.frequency for f in fields], window=window, amplitudes=[f.amplitude for f in fields]
        )

    edges: list[tuple[int, int] | None] = [None] * len(fields)
    for row in assignment:
        if not isinstance(row, list) or len(row) != 3:
            raise ControlError("INVALID_PAYLOAD", message="drives.assignment rows are [field, k, j]")
        f, k, j = (int(v) for v in row)
        if not 0 <= f < len(fields):
            raise ControlError("INVALID_PAYLOAD", message=f"drives.assignment references unknown field {f}")
        edges[f] = system.upper_lower((k, j))
    if any(e is None for e in edges):
        raise ControlError("INVALID_PAYLOAD", message="drives.assignment must cover every field")
    return DriveSet(tuple(fields), tuple(edges))


def drives_to_dict(drives: DriveSet) -> dict[str, Any]:
    return {
        "fields": [
            {"re": complex(f.amplitude).real, "im": complex(f.amplitude).imag, "omega": f.frequency}
            for f in drives.fields
        ],
        "assignment": [[f, k, j] for f, (k, j) in enumerate(drives.assignment)],
    }


# =============================================================================
# STATES
# =============================================================================


def state_from_dict(data: Mapping[str, Any] | list, dimension: int | None = None) -> StateVector:
    """c-frame state at t=0; also accepts a bare [[re, im], ...] list."""
    if isinstance(data, list):
        data = {"amplitudes": data}
    if not isinstance(data, Mapping):
        raise ControlError("INVALID_PAYLOAD", message="state must be an object or a list")

    if "amplitudes" in data:
        try:
            values = [complex(float(re), float(im)) for re, im in data["amplitudes"]]
        except (TypeError, ValueError) as exc:
            raise ControlError("INVALID_PAYLOAD", message="state.amplitudes rows are [re, im]") from exc
    elif "re" in data:
        re = data["re"]
        im = data.get("im", [0.0] * len(re))
        if len(re) != len(im):
            raise ControlError("INVALID_PAYLOAD", message="state.re and state.im differ in length")
        values = [complex(_float(a, "state.re"), _float(b, "state.im")) for a, b in zip(re, im)]
    else:
        raise ControlError("INVALID_PAYLOAD", message="state needs 'amplitudes' or 're'/'im'")

    if dimension is not None and len(values) != dimension:
        raise ControlError("INVALID_PAYLOAD", message=f"state has {len(values)} entries, expected {dimension}")
    return StateVector(values)


def state_to_dict(state: StateVector) -> dict[str, Any]:
    return {
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
        "frame": state.frame.value,
        "time": state.time,
    }


# =============================================================================
# TRANSFER PROBLEMS AND SOLUTIONS
# =============================================================================


def problem_from_dict(data: Mapping[str, Any], window: float | None = None) -> TransferProblem:
    system = system_from_dict(_require(data, "system", "problem"))
    goal = state_from_dict(_require(data, "goal", "problem"), system.dimension)
    initial = (
        state_from_dict(data["initial"], system.dimension)
        if data.get("initial") is not None
        else StateVector.basis(system.dimension, 0)
    )
    options = {
        "threshold": float(data.get("threshold", 1e-3)),
        "amplitude_bound": _optional_float(data.get("amplitude_bound")),
    }
    if "drives" in data:
        drives = drives_from_dict(data["drives"], system, window)
        return TransferProblem(system, drives, initial, goal, **options)
    detuning = _float(_require(data, "detuning", "problem"), "problem.detuning")
    return TransferProblem.from_detuning(system, detuning, goal, initial, **options)


def problem_to_dict(problem: TransferProblem) -> dict[str, Any]:
    return {
        "system": system_to_dict(problem.system),
        "drives": drives_to_dict(problem.drives),
        "initial": state_to_dict(problem.initial),
        "goal": state_to_dict(problem.goal),
        "threshold": problem.threshold,
        "amplitude_bound": problem.amplitude_bound,
    }


def solution_from_dict(data: Mapping[str, Any]) -> TransferSolution:
    amplitudes = _require(data, "amplitudes", "solution")
    phases = _require(data, "phases", "solution")
    if len(amplitudes) != len(phases):
        raise ControlError("INVALID_PAYLOAD", message="solution needs one phase per amplitude")
    rwa_infidelity = data.get("rwa_infidelity")
    return TransferSolution(
        amplitudes=tuple(_float(a, "solution.amplitudes") for a in amplitudes),
        phases=tuple(_float(p, "solution.phases") for p in phases),
        duration=_float(_require(data, "duration", "solution"), "solution.duration"),
        rwa_infidelity=math.nan if rwa_infidelity is None else float(rwa_infidelity),
        threshold=float(data.get("threshold", 1e-3)),
        exact_infidelity=_optional_float(data.get("exact_infidelity")),
        evaluations=int(data.get("evaluations", 0)),
        seed=data.get("seed"),
        method=str(data.get("method", "nelder-mead")),
    )


def solution_to_dict(solution: TransferSolution, problem: TransferProblem | None = None) -> dict[str, Any]:
    """Solution payload; with `problem` the result is a self-contained double-check input."""
    payload = {
        "amplitudes": list(solution.amplitudes),
        "phases": list(solution.phases),
        "duration": solution.duration,
        "rwa_infidelity": _finite(solution.rwa_infidelity),
        "exact_infidelity": _finite(solution.exact_infidelity),
        "rwa_success": solution.rwa_success,
        "exact_success": solution.exact_success,
        "threshold": solution.threshold,
        "evaluations": solution.evaluations,
        "exact_steps": solution.exact_steps,
        "norm_drift": _finite(solution.norm_drift),
        "seed": solution.seed,
        "method": solution.method,
    }
    if problem is not None:
        payload["problem"] = problem_to_dict(problem)
    return payload


# =============================================================================
# REPORTS
# =============================================================================


def jsonable(value: Any) -> Any:
    """Recursively turn numpy scalars, tuples, enums and NaN into JSON-safe values."""
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def rydberg_report_to_dict(report: RydbergReport) -> dict[str, Any]:
    return jsonable(
        {
            "mode": report.mode,
            "infidelity": report.infidelity,
            "printed_infidelity": report.printed_infidelity,
            "reoptimized": report.reoptimized,
            "solution": solution_to_dict(report.solution),
            "components": report.components,
            "cycles": report.cycles,
            "shared_lasers": report.shared_lasers,
            "blockade_scan": [{"blockade": u, "infidelity": i} for u, i in report.blockade_scan],
        }
    )

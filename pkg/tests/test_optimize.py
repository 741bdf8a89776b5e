"""Tests for the simplex search, transfer optimization and the exact double check."""

import logging
import math

import numpy as np
import pytest

from pulseman import optimize
from pulseman.adapters import EffectivePropagator
from pulseman.exceptions import ControlError
from pulseman.protocols import LevelSystem, SimplexConfig, StateVector, TransferProblem


def _quadratic(x):
    return float((x[0] - 1.0) ** 2 + (x[1] + 2.0) ** 2)


def _rosenbrock(x):
    return float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))


class TestNelderMead:
    """Tests for nelder_mead()."""

    def test_minimizes_quadratic(self):
        result = optimize.nelder_mead(_quadratic, [0.0, 0.0])
        assert result.fun < 1e-10
        np.testing.assert_allclose(result.x, [1.0, -2.0], atol=1e-4)
        assert result.converged

    def test_constant_objective_keeps_start(self):
        result = optimize.nelder_mead(lambda x: 3.0, [1.0, 2.0])
        np.testing.assert_array_equal(result.x, [1.0, 2.0])
        assert result.fun == 3.0
        assert result.converged

    def test_non_finite(self):
        with pytest.raises(ControlError) as exc:
            optimize.nelder_mead(lambda x: float("nan"), [0.0])
        assert exc.value.code == "OBJECTIVE_NON_FINITE"

    def test_evaluation_cap(self):
        for cap in (3, 10, 50, 51, 137):
            result = optimize.nelder_mead(_rosenbrock, [-1.2, 1.0], SimplexConfig(max_evaluations=cap))
            assert result.evaluations <= cap
            assert not result.converged

    def test_evaluation_cap_counts_every_call(self):
        calls = []

        def counted(x):
            calls.append(x)
            return _rosenbrock(x)

        result = optimize.nelder_mead(counted, [-1.2, 1.0, 0.5], SimplexConfig(max_evaluations=40, restarts=3))
        assert len(calls) == result.evaluations <= 40

    def test_rosenbrock_converges(self):
        config = SimplexConfig(max_evaluations=20_000, xtol=1e-10, ftol=1e-14)
        result = optimize.nelder_mead(_rosenbrock, [-1.2, 1.0], config)
        np.testing.assert_allclose(result.x, [1.0, 1.0], atol=1e-6)
        assert result.fun < 1e-12
        assert result.evaluations <= config.max_evaluations

    def test_target_stops_early(self):
        full = optimize.nelder_mead(_quadratic, [0.0, 0.0])
        early = optimize.nelder_mead(_quadratic, [0.0, 0.0], SimplexConfig(target=1e-3))
        assert early.fun <= 1e-3
        assert early.converged
        assert early.evaluations < full.evaluations

    def test_scale_shape(self):
        with pytest.raises(ControlError) as exc:
            optimize.nelder_mead(_quadratic, [0.0, 0.0], scale=[0.1])
        assert exc.value.code == "INVALID_CONFIG"


class TestSimplexConfig:
    """Tests for SimplexConfig validation."""

    def test_from_dict(self):
        config = SimplexConfig.from_dict({"max_evaluations": 10, "scale": [0.1, 0.2]})
        assert config.max_evaluations == 10
        assert config.scale == (0.1, 0.2)

    def test_unknown_key(self):
        with pytest.raises(ControlError) as exc:
            SimplexConfig.from_dict({"alpha": 1.0})
        assert exc.value.code == "INVALID_CONFIG"

    def test_expansion_must_exceed_reflection(self):
        with pytest.raises(ControlError):
            SimplexConfig(expansion=0.5)


class TestOptimizeTransfer:
    """Tests for optimize_transfer() and analytic_transfer()."""

    def test_trivial(self, two_level):
        problem = TransferProblem.from_detuning(two_level, 1e-3, [1, 0])
        solution = optimize.optimize_transfer(problem)
        assert solution.method == "trivial"
        assert solution.duration == 0.0
        assert solution.evaluations == 0
        assert solution.rwa_success

    def test_star_uses_closed_form(self, star, rng):
        goal = StateVector.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
        problem = TransferProblem.from_detuning(star, 1e-3, goal)
        solution = optimize.optimize_transfer(problem, seed=1)
        assert solution.method == "analytic"
        assert solution.rwa_infidelity < 1e-12
        assert solution.parameter_count == 7

    def test_analytic_transfer(self, hadamard_problem):
        solution = optimize.analytic_transfer(hadamard_problem)
        assert solution.method == "analytic"
        assert solution.rwa_infidelity < 1e-12
        assert solution.amplitudes[0] == pytest.approx(0.05)
        assert solution.duration == pytest.approx(math.pi / 2 / 0.05, rel=1e-3)

    def test_analytic_transfer_needs_star_from_center(self, chain):
        problem = TransferProblem.from_detuning(chain, 1e-3, [0, 0, 0, 1])
        with pytest.raises(ControlError) as exc:
            optimize.analytic_transfer(problem)
        assert exc.value.code == "INCONSISTENT_GOAL"

    def test_ladder_transfer(self):
        system = LevelSystem.from_edges((0.0, 1.0, 2.3), [(0, 1), (1, 2)])
        problem = TransferProblem.from_detuning(system, 1e-3, [0, 0, 1])
        solution = optimize.optimize_transfer(problem, seed=3)
        assert solution.method == "nelder-mead"
        assert solution.rwa_success
        assert solution.seed == 3
        assert solution.evaluations > 0

    def test_seed_is_deterministic(self):
        system = LevelSystem.from_edges((0.0, 1.0, 2.3), [(0, 1), (1, 2)])
        problem = TransferProblem.from_detuning(system, 1e-3, [0, 0, 1])
        config = SimplexConfig(max_evaluations=300)
        first = optimize.optimize_transfer(problem, config, seed=11)
        second = optimize.optimize_transfer(problem, config, seed=11)
        assert first.amplitudes == second.amplitudes
        assert first.duration == second.duration

    def test_amplitude_bound(self, chain):
        problem = TransferProblem.from_detuning(chain, 1e-3, [0, 0, 0, 1], amplitude_bound=0.05)
        solution = optimize.optimize_transfer(problem, SimplexConfig(max_evaluations=500), seed=0)
        assert max(solution.amplitudes) <= 0.05
        assert all(0 <= p <= 2 * math.pi for p in solution.phases)


class TestDoubleCheck:
    """Tests for double_check()."""

    def test_weak_drive_confirms(self, hadamard_problem):
        solution = optimize.optimize_transfer(hadamard_problem)
        checked = optimize.double_check(hadamard_problem, solution)
        assert checked.exact_success
        assert checked.exact_steps > 0
        assert checked.norm_drift is not None
        assert solution.exact_infidelity is None

    def test_effective_backend_reproduces_rwa(self, hadamard_problem):
        solution = optimize.optimize_transfer(hadamard_problem)
        checked = optimize.double_check(hadamard_problem, solution, propagator=EffectivePropagator())
        assert checked.exact_infidelity == pytest.approx(solution.rwa_infidelity, abs=1e-10)

    def test_rwa_final_state(self, hadamard_problem):
        solution = optimize.analytic_transfer(hadamard_problem)
        state = optimize.rwa_final_state(hadamard_problem, solution)
        assert state.time == solution.duration
        assert abs(state.amplitudes[1]) ** 2 == pytest.approx(0.5, abs=1e-10)

    def test_strong_drive_warns(self, two_level, caplog):
        problem = TransferProblem.from_detuning(two_level, 0.0, [0, 1], amplitude_bound=0.8)
        solution = optimize.analytic_transfer(problem)
        assert solution.rwa_success
        with caplog.at_level(logging.WARNING, logger="pulseman.optimize"):
            checked = optimize.double_check(problem, solution)
        assert checked.exact_success is False
        assert "Double check failed" in caplog.text

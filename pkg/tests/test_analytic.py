"""Tests for the closed-form two-level and star solutions."""

import math

import numpy as np
import pytest

from pulseman import analytic, dynamics
from pulseman.exceptions import ControlError
from pulseman.protocols import Frame, StarGoal, StateVector, TwoLevelGoal


def _closure(goal_vector, reached):
    return dynamics.vector_infidelity(np.asarray(goal_vector), np.asarray(reached))


class TestTwoLevel:
    """Tests for two_level_solve()."""

    def test_resonant_half_flip(self):
        solution = analytic.two_level_solve(TwoLevelGoal(math.pi / 2), 1.0, 0.0)
        assert solution.duration == pytest.approx(math.pi / 2)
        assert solution.phases[0] == pytest.approx(math.pi / 2)
        assert solution.amplitudes[0] == pytest.approx(1.0)
        assert solution.rabi == pytest.approx(1.0)

    def test_closure(self, rng):
        detuning = 0.3
        for _ in range(1000):
            goal = TwoLevelGoal(rng.uniform(0.05, 2.5), rng.uniform(0, 2 * math.pi))
            solution = analytic.two_level_solve(goal, 1.0, detuning)
            reached = analytic.two_level_evolve(solution.complex_amplitudes[0], detuning, solution.duration)
            assert _closure(goal.vector(), reached) < 1e-12

    def test_evolve_matches_generator(self, rng):
        for _ in range(1000):
            amplitude = rng.uniform(0.01, 2.0) * np.exp(1j * rng.uniform(0, 2 * math.pi))
            detuning, t = rng.uniform(-1.0, 1.0), rng.uniform(0.0, 20.0)
            b = dynamics.propagate_effective(
                analytic.star_generator([amplitude], detuning), StateVector([1, 0], Frame.B), t
            )
            c = b.amplitudes * np.exp(1j * detuning * t * np.array([0, 1]))
            np.testing.assert_allclose(c, analytic.two_level_evolve(amplitude, detuning, t), atol=1e-12)

    def test_ground_goal_needs_no_pulse(self):
        solution = analytic.two_level_solve(TwoLevelGoal(0.0), 1.0, 0.2)
        assert solution.duration == 0.0

    def test_max_reachable_theta(self):
        assert analytic.max_reachable_theta(1.0, 0.0) == pytest.approx(math.pi)
        assert analytic.max_reachable_theta(1.0, 1.0) == pytest.approx(math.pi / 2)
        assert analytic.check_two_level_reachable(TwoLevelGoal(1.5), 1.0, 1.0)
        assert not analytic.check_two_level_reachable(TwoLevelGoal(1.6), 1.0, 1.0)

    def test_unreachable(self):
        with pytest.raises(ControlError) as exc:
            analytic.two_level_solve(TwoLevelGoal(3.0), 1.0, 1.0)
        assert exc.value.code == "UNREACHABLE"
        assert exc.value.max_theta == pytest.approx(math.pi / 2)

    def test_amplitude_must_be_positive(self):
        with pytest.raises(ControlError):
            analytic.two_level_solve(TwoLevelGoal(1.0), 0.0, 0.0)

    def test_theta_range(self):
        with pytest.raises(ControlError):
            TwoLevelGoal(4.0)


class TestStar:
    """Tests for star_solve(), star_evolve() and star_generator()."""

    def test_closure_at_resonance(self, rng):
        for _ in range(200):
            goal = analytic.star_goal(rng.normal(size=4) + 1j * rng.normal(size=4))
            solution = analytic.star_solve(goal, [0.5, 0.5, 0.5], 0.0)
            reached = analytic.star_evolve(solution.complex_amplitudes, 0.0, solution.duration)
            assert _closure(goal.vector(), reached) < 1e-12

    def test_closure_detuned(self):
        xi = (0.5, 0.5, math.sqrt(0.5))
        goal = StarGoal(xi=xi, beta=(0.3, 4.0))
        solution = analytic.star_solve(goal, [0.4, 0.4], 0.05)
        reached = analytic.star_evolve(solution.complex_amplitudes, 0.05, solution.duration)
        assert _closure(goal.vector(), reached) < 1e-12

    def test_amplitudes_follow_moduli(self):
        goal = StarGoal(xi=(0.6, 0.48, 0.64), beta=(0.0, 1.0))
        solution = analytic.star_solve(goal, [1.0, 0.2], 0.0)
        ratios = np.asarray(solution.amplitudes) / np.asarray(goal.xi[1:])
        assert ratios[0] == pytest.approx(ratios[1])
        # the budget sum |A_k|^2 is kept
        assert sum(a * a for a in solution.amplitudes) == pytest.approx(1.04)

    def test_populated_leaf_without_drive(self):
        goal = StarGoal(xi=(0.6, 0.48, 0.64), beta=(0.0, 0.0))
        with pytest.raises(ControlError) as exc:
            analytic.star_solve(goal, [1.0, 0.0], 0.0)
        assert exc.value.code == "INCONSISTENT_GOAL"

    def test_generator_matches_evolution(self):
        amplitudes = [0.3 * np.exp(0.2j), 0.1j]
        detuning, t = 0.04, 7.0
        b0 = StateVector([1, 0, 0], Frame.B)
        b = dynamics.propagate_effective(analytic.star_generator(amplitudes, detuning), b0, t)
        # gamma is -detuning on the leaves, so c = exp(i detuning t) b there
        c = b.amplitudes * np.exp(1j * detuning * t * np.array([0, 1, 1]))
        np.testing.assert_allclose(c, analytic.star_evolve(amplitudes, detuning, t), atol=1e-12)


    def test_evolve_matches_generator_random(self, rng):
        for _ in range(1000):
            leaves = int(rng.integers(1, 6))
            amplitudes = rng.uniform(0.01, 1.0, leaves) * np.exp(1j * rng.uniform(0, 2 * math.pi, leaves))
            detuning, t = rng.uniform(-0.5, 0.5), rng.uniform(0.0, 30.0)
            b0 = StateVector.basis(leaves + 1, 0, Frame.B)
            b = dynamics.propagate_effective(analytic.star_generator(amplitudes, detuning), b0, t)
            c = b.amplitudes * np.exp(1j * detuning * t * (np.arange(leaves + 1) > 0))
            np.testing.assert_allclose(c, analytic.star_evolve(amplitudes, detuning, t), atol=1e-10)

    def test_two_level_star_agrees_with_two_level_solve(self, rng):
        for _ in range(200):
            theta, phi = rng.uniform(0.05, 2.0), rng.uniform(0, 2 * math.pi)
            amplitude, detuning = rng.uniform(0.5, 2.0), rng.uniform(-0.3, 0.3)
            two = analytic.two_level_solve(TwoLevelGoal(theta, phi), amplitude, detuning)
            star = analytic.star_solve(
                StarGoal(xi=(math.cos(theta / 2), math.sin(theta / 2)), beta=(phi,)), [amplitude], detuning
            )
            assert star.duration == pytest.approx(two.duration, abs=1e-14)
            assert star.rabi == pytest.approx(two.rabi, abs=1e-14)
            np.testing.assert_allclose(star.complex_amplitudes, two.complex_amplitudes, atol=1e-14)
            np.testing.assert_allclose(
                analytic.star_evolve(star.complex_amplitudes, detuning, star.duration),
                analytic.two_level_evolve(two.complex_amplitudes[0], detuning, two.duration),
                atol=1e-14,
            )


class TestGoals:
    """Tests for bloch_goal() and star_goal()."""

    def test_bloch_round_trip(self):
        goal = TwoLevelGoal(1.1, 2.0)
        recovered = analytic.bloch_goal(goal.vector() * np.exp(0.4j))
        assert recovered.theta == pytest.approx(1.1)
        assert recovered.phi == pytest.approx(2.0)

    def test_star_goal_fixes_center_phase(self):
        goal = analytic.star_goal(np.array([1j, -1j, 1]) / math.sqrt(3))
        assert goal.xi == pytest.approx((1 / math.sqrt(3),) * 3)
        assert goal.beta == pytest.approx((math.pi, 3 * math.pi / 2))

    def test_zero_vector(self):
        with pytest.raises(ControlError) as exc:
            analytic.bloch_goal([0, 0])
        assert exc.value.code == "INVALID_PAYLOAD"

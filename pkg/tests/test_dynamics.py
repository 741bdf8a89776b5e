"""Tests for frames, metrics and both propagators."""

import math
import threading

import numpy as np
import pandas as pd
import pytest

from pulseman import dynamics, rwa
from pulseman.exceptions import ControlError
from pulseman.protocols import DriveField, DriveSet, Frame, GammaAssignment, LevelSystem, StateVector


def _random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


class TestFrames:
    """Tests for frame_transform()."""

    def test_round_trip(self, chain, rng):
        gamma = GammaAssignment(gamma=(0.0, -0.01, 0.02, 0.005), root=0)
        lab = StateVector.normalized(rng.normal(size=4) + 1j * rng.normal(size=4), Frame.LAB, 2.3)
        b = dynamics.frame_transform(lab, Frame.B, system=chain, gamma=gamma)
        assert b.frame is Frame.B
        assert b.time == 2.3
        back = dynamics.frame_transform(b, "lab", system=chain, gamma=gamma)
        np.testing.assert_allclose(back.amplitudes, lab.amplitudes, atol=1e-14)

    def test_lab_to_c_phases(self, two_level):
        lab = StateVector([0.6, 0.8], Frame.LAB, 1.5)
        c = dynamics.frame_transform(lab, Frame.C, system=two_level)
        np.testing.assert_allclose(c.amplitudes, [0.6, 0.8 * np.exp(1.5j)])

    def test_same_frame_is_identity(self, two_level):
        state = StateVector([1, 0])
        assert dynamics.frame_transform(state, Frame.C) is state

    def test_missing_system(self):
        with pytest.raises(ControlError) as exc:
            dynamics.frame_transform(StateVector([1, 0], Frame.LAB, 1.0), Frame.C)
        assert exc.value.code == "INVALID_CONFIG"


class TestInfidelity:
    """Tests for infidelity() and hilbert_distance()."""

    def test_global_phase_invariant(self, rng):
        amplitudes = rng.normal(size=3) + 1j * rng.normal(size=3)
        goal = StateVector.normalized(amplitudes)
        reached = StateVector(goal.amplitudes * np.exp(0.7j))
        assert dynamics.infidelity(goal, reached) == pytest.approx(0.0, abs=1e-14)

    def test_orthogonal(self):
        assert dynamics.infidelity(StateVector([1, 0]), StateVector([0, 1])) == 1.0

    def test_frame_mismatch(self):
        with pytest.raises(ControlError) as exc:
            dynamics.infidelity(StateVector([1, 0], Frame.C), StateVector([1, 0], Frame.B))
        assert exc.value.code == "FRAME_MISMATCH"

    def test_time_mismatch(self):
        with pytest.raises(ControlError) as exc:
            dynamics.infidelity(StateVector([1, 0], time=1.0), StateVector([1, 0], time=2.0))
        assert exc.value.code == "FRAME_MISMATCH"

    def test_hilbert_distance_sees_phase(self):
        assert dynamics.hilbert_distance(StateVector([1, 0]), StateVector([-1, 0])) == pytest.approx(2.0)


class TestEffectivePropagation:
    """Tests for propagate_effective() and its trajectory variant."""

    def test_requires_b_frame(self):
        with pytest.raises(ControlError) as exc:
            dynamics.propagate_effective(np.zeros((2, 2)), StateVector([1, 0], Frame.C), 1.0)
        assert exc.value.code == "FRAME_MISMATCH"

    def test_unitary(self, rng):
        h = _random_hermitian(rng, 5)
        u = dynamics.evolution_operator(h, 3.7)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)

    def test_preserves_norm_and_advances_time(self, rng):
        b0 = StateVector.normalized(rng.normal(size=4) + 0j, Frame.B, 1.0)
        b = dynamics.propagate_effective(_random_hermitian(rng, 4), b0, 2.5)
        assert b.norm == pytest.approx(1.0, abs=1e-12)
        assert b.time == pytest.approx(3.5)

    def test_zero_duration(self, rng):
        b0 = StateVector([1, 0], Frame.B)
        assert dynamics.propagate_effective(_random_hermitian(rng, 2), b0, 0.0) is b0

    def test_non_hermitian(self):
        with pytest.raises(ControlError) as exc:
            dynamics.propagate_effective(np.array([[0, 1], [0, 0]]), StateVector([1, 0], Frame.B), 1.0)
        assert exc.value.code == "NON_HERMITIAN_GENERATOR"

    def test_resonant_pi_pulse(self):
        # [[0, A/2], [A/2, 0]] flips the population at T = pi / A.
        g = np.array([[0, 0.05], [0.05, 0]], dtype=complex)
        b = dynamics.propagate_effective(g, StateVector([1, 0], Frame.B), math.pi / 0.1)
        assert abs(b.amplitudes[1]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_composition(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 7))
            h = _random_hermitian(rng, n)
            t1, t2 = rng.uniform(0, 5, 2)
            np.testing.assert_allclose(
                dynamics.evolution_operator(h, t1 + t2),
                dynamics.evolution_operator(h, t2) @ dynamics.evolution_operator(h, t1),
                atol=1e-12,
            )
            b0 = StateVector.normalized(rng.normal(size=n) + 1j * rng.normal(size=n), Frame.B)
            two_steps = dynamics.propagate_effective(h, dynamics.propagate_effective(h, b0, t1), t2)
            one_step = dynamics.propagate_effective(h, b0, t1 + t2)
            np.testing.assert_allclose(two_steps.amplitudes, one_step.amplitudes, atol=1e-12)
            assert two_steps.time == pytest.approx(one_step.time)

    def test_trajectory_matches_single_shots(self, rng):
        h = _random_hermitian(rng, 3)
        b0 = StateVector([1, 0, 0], Frame.B)
        times = [0.0, 0.5, 2.0]
        for state, t in zip(dynamics.propagate_effective_trajectory(h, b0, times), times):
            expected = dynamics.propagate_effective(h, b0, t) if t else b0
            np.testing.assert_allclose(state.amplitudes, expected.amplitudes, atol=1e-12)


class TestExactPropagation:
    """Tests for propagate_exact()."""

    def test_requires_lab_state_at_zero(self, two_level):
        drives = DriveSet((DriveField(0.01, 1.0),), ((1, 0),))
        with pytest.raises(ControlError) as exc:
            dynamics.propagate_exact(two_level, drives, StateVector([1, 0], Frame.C), 1.0)
        assert exc.value.code == "FRAME_MISMATCH"
        with pytest.raises(ControlError):
            dynamics.propagate_exact(two_level, drives, StateVector([1, 0], Frame.LAB, 1.0), 1.0)

    def test_zero_amplitude_is_free_evolution(self):
        system = LevelSystem.from_edges((0.0, 2.0), [(0, 1)])
        drives = DriveSet((DriveField(0j, 2.0),), ((1, 0),))
        psi0 = StateVector([0.6, 0.8], Frame.LAB)
        result = dynamics.propagate_exact(system, drives, psi0, 3.0)
        np.testing.assert_allclose(result.state.amplitudes, [0.6, 0.8 * np.exp(-6j)], atol=1e-10)
        assert result.method == "dop853"
        assert result.state.frame is Frame.LAB
        assert result.state.time == 3.0

    def test_long_free_evolution(self):
        energies = (0.0, 1.3, 2.9, 4.4)
        system = LevelSystem.from_edges(energies, [(0, 1), (1, 2), (2, 3)])
        drives = DriveSet(tuple(DriveField(0j, w) for w in (1.3, 1.6, 1.5)), ((1, 0), (2, 1), (3, 2)))
        psi0 = StateVector.normalized([0.5, 0.5j, -0.5, 0.5], Frame.LAB)
        for duration in (10.0, 1e2, 1e3):
            result = dynamics.propagate_exact(system, drives, psi0, duration)
            expected = psi0.amplitudes * np.exp(-1j * np.asarray(energies) * duration)
            np.testing.assert_allclose(result.state.amplitudes, expected, atol=1e-10)
            assert result.norm_drift < 1e-9

    def test_zero_duration(self, two_level):
        drives = DriveSet((DriveField(0.01, 1.0),), ((1, 0),))
        result = dynamics.propagate_exact(two_level, drives, StateVector([1, 0], Frame.LAB), 0.0)
        assert result.steps == 0
        np.testing.assert_allclose(result.state.amplitudes, [1, 0])

    def test_agrees_with_rwa_for_weak_drive(self):
        system = LevelSystem.from_edges((0.0, 10.0), [(0, 1)])
        drives = DriveSet((DriveField(0.02, 10.0),), ((1, 0),))
        duration = math.pi / 0.02
        result = dynamics.propagate_exact(system, drives, StateVector([1, 0], Frame.LAB), duration)

        generator = rwa.effective_model(system, drives)
        b = dynamics.propagate_effective(generator, StateVector([1, 0], Frame.B), duration)
        c_rwa = dynamics.frame_transform(b, Frame.C, gamma=generator.gamma)
        c_exact = dynamics.frame_transform(result.state, Frame.C, system=system)

        assert dynamics.infidelity(c_rwa, c_exact) < 1e-3
        assert abs(c_exact.amplitudes[1]) ** 2 > 0.999
        assert result.steps > 0
        assert result.evaluations >= result.steps
        assert result.norm_drift < 1e-6

    def test_cancelled(self, two_level):
        drives = DriveSet((DriveField(0.01, 1.0),), ((1, 0),))
        stop = threading.Event()
        stop.set()
        with pytest.raises(ControlError) as exc:
            dynamics.propagate_exact(two_level, drives, StateVector([1, 0], Frame.LAB), 10.0, stop=stop)
        assert exc.value.code == "CANCELLED"

    def test_trajectory_csv(self, two_level, tmp_path):
        drives = DriveSet((DriveField(0.05, 1.0),), ((1, 0),))
        path = tmp_path / "traj" / "run.csv"
        dynamics.propagate_exact(two_level, drives, StateVector([1, 0], Frame.LAB), 2.0, trajectory=path)

        frame = pd.read_csv(path)
        assert list(frame.columns) == ["t", "re_0", "im_0", "re_1", "im_1"]
        assert frame["t"].iloc[0] == 0.0
        assert frame["t"].iloc[-1] == pytest.approx(2.0)
        assert frame["re_0"].iloc[0] == 1.0

    def test_drive_signal(self):
        drives = DriveSet((DriveField(1j, 2.0),), ((1, 0),))
        assert dynamics.drive_signal(drives, 0.3) == pytest.approx(math.sin(0.6))

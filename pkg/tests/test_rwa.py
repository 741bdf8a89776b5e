"""Tests for the multilevel RWA: field assignment, M(II) and the effective generator."""

import logging

import numpy as np
import pytest

from pulseman import analytic, rwa
from pulseman import graph as level_graph
from pulseman.exceptions import ControlError
from pulseman.protocols import DriveField, DriveSet, GammaAssignment, LevelSystem


def _drives(system, detuning, amplitudes):
    assignment = tuple(system.upper_lower(e) for e in system.edges)
    fields = tuple(DriveField(a, system.transition(u, l) - detuning) for a, (u, l) in zip(amplitudes, assignment))
    return DriveSet(fields, assignment)


class TestAssignFields:
    """Tests for assign_fields()."""

    def test_default_window(self, star):
        # smallest of the frequencies 1.0, 1.3, 1.7 and their gaps 0.3, 0.4
        assert rwa.default_window(star) == pytest.approx(0.03)

    def test_matches_by_resonance(self, star):
        drives = rwa.assign_fields(star, [1.299, 1.002, 1.7])
        assert drives.assignment == ((2, 0), (1, 0), (3, 0))
        assert drives.frequencies == (1.299, 1.002, 1.7)

    def test_no_resonance(self, star):
        with pytest.raises(ControlError) as exc:
            rwa.assign_fields(star, [1.0, 1.15])
        assert exc.value.code == "NO_RESONANT_TRANSITION"
        assert exc.value.field == 1

    def test_ambiguous(self, star):
        with pytest.raises(ControlError) as exc:
            rwa.assign_fields(star, [1.15], window=0.5)
        assert exc.value.code == "AMBIGUOUS_RESONANCE"

    def test_duplicate(self, star):
        with pytest.raises(ControlError) as exc:
            rwa.assign_fields(star, [1.0, 1.001])
        assert exc.value.code == "DUPLICATE_DRIVE"

    def test_duplicate_driveset(self):
        with pytest.raises(ControlError) as exc:
            DriveSet((DriveField(0j, 1.0), DriveField(0j, 1.1)), ((1, 0), (0, 1)))
        assert exc.value.code == "DUPLICATE_DRIVE"
        assert exc.value.edge == (0, 1)


class TestBuildM2:
    """Tests for build_m2()."""

    def test_entries(self):
        system = LevelSystem.from_edges((0.0, 1.0, 2.5), [(0, 1), (1, 2)], value=0.5 + 0.5j)
        drives = _drives(system, 0.0, [0.1, 0.2j])
        m2 = rwa.build_m2(system, drives)
        # (H_C)_{10} is the conjugate of the stored (0, 1) value
        assert m2[1, 0] == pytest.approx(0.5 * 0.1 * (0.5 - 0.5j))
        assert m2[2, 1] == pytest.approx(0.5 * 0.2j * (0.5 - 0.5j))
        np.testing.assert_allclose(m2, m2.conj().T)
        assert m2[0, 2] == 0

    def test_undriven_edge(self, chain):
        drives = rwa.assign_fields(chain, [1.0, 1.3])
        with pytest.raises(ControlError) as exc:
            rwa.build_m2(chain, drives)
        assert exc.value.code == "UNASSIGNED_EDGE"
        assert exc.value.edge == (2, 3)

    def test_sparse_zeroes_undriven(self, chain):
        drives = rwa.assign_fields(chain, [1.0, 1.3], amplitudes=[0.1, 0.1])
        m2 = rwa.build_m2(chain, drives, sparse=True)
        assert m2[3, 2] == 0
        assert m2[1, 0] == pytest.approx(0.05)


class TestEffectiveGenerator:
    """Tests for build_effective_generator() and effective_model()."""

    def test_two_level_matches_star_generator(self, two_level):
        amplitude, detuning = 0.03 * np.exp(0.4j), 2e-3
        generator = rwa.effective_model(two_level, _drives(two_level, detuning, [amplitude]))
        np.testing.assert_allclose(generator.matrix, analytic.star_generator([amplitude], detuning), atol=1e-15)

    def test_hermitian_and_read_only(self, chain, rng):
        drives = _drives(chain, 1e-3, rng.normal(size=3) + 1j * rng.normal(size=3))
        generator = rwa.effective_model(chain, drives)
        np.testing.assert_allclose(generator.matrix, generator.matrix.conj().T)
        with pytest.raises(ValueError):
            generator.matrix[0, 0] = 1.0

    def test_b_frame_is_time_independent(self, chain, rng):
        drives = _drives(chain, 1e-3, [0.1, 0.05j, -0.02])
        gamma = level_graph.assign_gamma(level_graph.build_graph(chain), rwa.oriented_detunings(chain, drives))
        m2 = rwa.build_m2(chain, drives)
        h0 = rwa.b_frame_hamiltonian(m2, gamma, 0.0)
        for t in rng.uniform(0, 1e4, 5):
            np.testing.assert_allclose(rwa.b_frame_hamiltonian(m2, gamma, t), h0, atol=1e-12)
        np.testing.assert_allclose(rwa.b_frame_phases(gamma, [0.0, 10.0]), 1.0, atol=1e-12)

    def test_nonvanishing_residuals(self):
        gamma = GammaAssignment(gamma=(0.0, 0.0), root=0, detunings={(0, 1): 0.0}, residuals={(0, 1): 0.5})
        with pytest.raises(ControlError) as exc:
            rwa.build_effective_generator(np.zeros((2, 2)), gamma)
        assert exc.value.code == "NONVANISHING_RESIDUALS"

    def test_non_hermitian(self):
        gamma = GammaAssignment(gamma=(0.0, 0.0), root=0)
        with pytest.raises(ControlError) as exc:
            rwa.build_effective_generator(np.array([[0, 1], [0, 0]], dtype=complex), gamma)
        assert exc.value.code == "NON_HERMITIAN_GENERATOR"

    def test_consistent_cycle_accepted(self, triangle):
        # Delta_20 = Delta_21 + Delta_10 keeps the cycle sum at zero.
        drives = DriveSet(
            (DriveField(0.1, 1.0 - 0.01), DriveField(0.1, 1.5 - 0.02), DriveField(0.1, 2.5 - 0.03)),
            ((1, 0), (2, 1), (2, 0)),
        )
        generator = rwa.effective_model(triangle, drives)
        assert generator.gamma.vanishes(1e-12)

    def test_inconsistent_cycle_rejected(self, triangle):
        drives = DriveSet(
            (DriveField(0.1, 1.0 - 0.01), DriveField(0.1, 1.5 - 0.02), DriveField(0.1, 2.5 - 0.05)),
            ((1, 0), (2, 1), (2, 0)),
        )
        with pytest.raises(ControlError) as exc:
            rwa.effective_model(triangle, drives)
        assert exc.value.code == "CYCLIC_GRAPH"


class TestCheckValidity:
    """Tests for check_validity()."""

    def test_weak_drive_passes(self):
        system = LevelSystem.from_edges((0.0, 10.0), [(0, 1)])
        report = rwa.check_validity(system, _drives(system, 0.01, [0.05]))
        assert report.detuning_ratios[0] == pytest.approx(0.01 / 9.99)
        assert report.amplitude_ratios[0] == pytest.approx(0.05 / 9.99)
        assert report.passed

    def test_strong_drive_fails_and_warns(self, caplog):
        system = LevelSystem.from_edges((0.0, 10.0), [(0, 1)])
        with caplog.at_level(logging.WARNING, logger="pulseman.rwa"):
            report = rwa.check_validity(system, _drives(system, 0.0, [1.0]))
        assert not report.passed
        assert report.worst_ratio == pytest.approx(0.1)
        assert "RWA validity check failed" in caplog.text


class TestOffResonanceGap:
    """Tests for off_resonance_gap()."""

    def test_two_level_is_drive_frequency(self):
        system = LevelSystem.from_edges((0.0, 10.0), [(0, 1)])
        assert rwa.off_resonance_gap(system, _drives(system, 0.01, [0.05])) == pytest.approx(9.99)

    def test_chain_uses_nearest_foreign_transition(self):
        chain = LevelSystem.from_edges((0.0, 1.0, 2.3), [(0, 1), (1, 2)])
        # field at 1.29 sits 0.29 from the 1.0 transition
        assert rwa.off_resonance_gap(chain, _drives(chain, 0.01, [0.1, 0.1])) == pytest.approx(0.29)

    def test_small_frequency_dominates(self):
        system = LevelSystem.from_edges((0.0, 0.2, 5.0), [(0, 1), (0, 2)])
        assert rwa.off_resonance_gap(system, _drives(system, 0.0, [0.1, 0.1])) == pytest.approx(0.2)

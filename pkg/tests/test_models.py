"""Tests for Pulseman models."""

import pytest
from django.core.exceptions import ValidationError
from django.db import IntegrityError

from pulseman.models import LevelScheme, SweepResult, SweepRun, SweepStatus
from pulseman.protocols import LevelSystem

pytestmark = pytest.mark.django_db


class TestLevelScheme:
    """Tests for LevelScheme model."""

    def test_create(self, level_scheme):
        """Test scheme creation and derived fields."""
        assert level_scheme.dimension == 3
        assert str(level_scheme) == "ladder - Ladder (N=3)"
        assert level_scheme.uuid is not None

    def test_to_system(self, level_scheme):
        """Test conversion to an immutable LevelSystem."""
        system = level_scheme.to_system()
        assert system.energies == (0.0, 1.0, 2.3)
        assert system.edges == ((0, 1), (1, 2))
        assert system.coupling(1, 2) == 0.5 + 0.5j
        assert system.coupling(2, 1) == 0.5 - 0.5j

    def test_from_system_round_trip(self, star):
        """Test from_system() keeps energies and couplings."""
        scheme = LevelScheme.from_system(star, slug="star", name="Star")
        scheme.save()
        assert LevelScheme.objects.get(slug="star").to_system() == star

    def test_invalid_coupling_rejected(self, db):
        """Test save() validates couplings through LevelSystem."""
        with pytest.raises(ValidationError) as exc:
            LevelScheme.objects.create(
                slug="bad",
                name="Bad",
                energies=[0.0, 1.0],
                couplings=[{"k": 0, "j": 5, "re": 1.0, "im": 0.0}],
            )
        assert "couplings" in exc.value.message_dict

    def test_malformed_coupling_rejected(self, db):
        """Test a coupling entry without indices."""
        with pytest.raises(ValidationError):
            LevelScheme.objects.create(slug="bad", name="Bad", energies=[0.0, 1.0], couplings=[{"re": 1.0}])

    def test_single_level_rejected(self, db):
        with pytest.raises(ValidationError):
            LevelScheme.objects.create(slug="one", name="One", energies=[0.0])

    def test_keywords(self, level_scheme):
        """Test tagging via django-taggit."""
        level_scheme.keywords.add("ladder", "three-level")
        assert set(level_scheme.keywords.names()) == {"ladder", "three-level"}

    def test_history(self, level_scheme):
        """Test simple-history tracks edits."""
        level_scheme.name = "Renamed ladder"
        level_scheme.save()
        assert level_scheme.history.count() == 2
        assert level_scheme.history.earliest().name == "Ladder"

    def test_scheme_created_signal(self, db):
        """Test scheme_created fires once, on creation."""
        from pulseman.signals import scheme_created

        received = []

        def handler(sender, instance, slug, **kwargs):
            received.append(slug)

        scheme_created.connect(handler)
        try:
            scheme = LevelScheme.from_system(LevelSystem.from_edges((0.0, 1.0), [(0, 1)]), slug="tls", name="TLS")
            scheme.save()
            scheme.description = "edited"
            scheme.save()
        finally:
            scheme_created.disconnect(handler)
        assert received == ["tls"]


class TestSweepRun:
    """Tests for SweepRun and SweepResult models."""

    def test_defaults(self, sweep_run):
        assert sweep_run.status == SweepStatus.PENDING
        assert sweep_run.summary == []
        assert str(sweep_run) == "run-1 (Pending)"

    def test_queryset_filters(self, sweep_run):
        """Test SweepRunQuerySet.done() and failed()."""
        SweepRun.objects.create(code="run-2", status=SweepStatus.DONE)
        SweepRun.objects.create(code="run-3", status=SweepStatus.FAILED)
        assert list(SweepRun.objects.done().values_list("code", flat=True)) == ["run-2"]
        assert list(SweepRun.objects.failed().values_list("code", flat=True)) == ["run-3"]

    def test_error_count(self, sweep_run):
        SweepResult.objects.create(run=sweep_run, dimension=2, detuning=1e-3, seed=1)
        SweepResult.objects.create(run=sweep_run, dimension=2, detuning=1e-3, seed=2, error="UNREACHABLE")
        assert sweep_run.error_count == 1
        assert sweep_run.results.count() == 2

    def test_result_ordering(self, sweep_run):
        SweepResult.objects.create(run=sweep_run, dimension=3, detuning=1e-3, seed=1)
        SweepResult.objects.create(run=sweep_run, dimension=2, detuning=1e-2, seed=9)
        SweepResult.objects.create(run=sweep_run, dimension=2, detuning=1e-3, seed=5)
        keys = [(r.dimension, r.detuning) for r in sweep_run.results.all()]
        assert keys == [(2, 1e-3), (2, 1e-2), (3, 1e-3)]

    def test_unique_cell(self, sweep_run):
        """Test one row per (run, dimension, detuning, seed)."""
        SweepResult.objects.create(run=sweep_run, dimension=2, detuning=1e-3, seed=1)
        with pytest.raises(IntegrityError):
            SweepResult.objects.create(run=sweep_run, dimension=2, detuning=1e-3, seed=1)

    def test_result_str(self, sweep_run):
        result = SweepResult.objects.create(run=sweep_run, dimension=4, detuning=1e-5, seed=3, goal_index=7)
        assert str(result) == "run-1 N=4 delta=1e-05 #7"

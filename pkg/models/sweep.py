"""SweepRun and SweepResult models."""

import uuid as uuid_lib

from django.db import models
from django.utils.translation import gettext_lazy as _
from simple_history.models import HistoricalRecords
from taggit.managers import TaggableManager


class SweepStatus(models.TextChoices):
    PENDING = "pending", _("Pending")
    RUNNING = "running", _("Running")
    DONE = "done", _("Done")
    FAILED = "failed", _("Failed")


class SweepRunQuerySet(models.QuerySet):
    def done(self):
        return self.filter(status=SweepStatus.DONE)

    def failed(self):
        return self.filter(status=SweepStatus.FAILED)


class SweepRun(models.Model):
    """A detuning sweep: its configuration and the success-fraction summary."""

    uuid = models.UUIDField(default=uuid_lib.uuid4, editable=False, unique=True, verbose_name=_("UUID"))

    code = models.SlugField(_("code"), max_length=100, unique=True)
    config = models.JSONField(_("configuration"), default=dict)
    master_seed = models.BigIntegerField(_("master seed"), default=0)
    status = models.CharField(
        _("status"),
        max_length=20,
        choices=SweepStatus.choices,
        default=SweepStatus.PENDING,
        db_index=True,
    )
    summary = models.JSONField(
        _("summary"),
        default=list,
        blank=True,
        help_text=_("Success fractions per (dimension, detuning) cell"),
    )
    error = models.TextField(_("error"), blank=True)

    tags = TaggableManager(blank=True, verbose_name=_("tags"))

    created_at = models.DateTimeField(_("created at"), auto_now_add=True)
    updated_at = models.DateTimeField(_("updated at"), auto_now=True)

    history = HistoricalRecords()

    objects = SweepRunQuerySet.as_manager()

    class Meta:
        verbose_name = _("sweep run")
        verbose_name_plural = _("sweep runs")
        ordering = ["-created_at"]

    def __str__(self):
        return f"{self.code} ({self.get_status_display()})"

    @property
    def error_count(self) -> int:
        return self.results.exclude(error="").count()


class SweepResult(models.Model):
    """One random instance of a sweep cell."""

    run = models.ForeignKey(
        SweepRun,
        on_delete=models.CASCADE,
        related_name="results",
        verbose_name=_("run"),
    )
    dimension = models.PositiveSmallIntegerField(_("dimension"))
    detuning = models.FloatField(_("detuning"))
    goal_index = models.PositiveIntegerField(_("goal index"), default=0)
    seed = models.BigIntegerField(_("instance seed"))
    distance = models.FloatField(_("distance"), null=True, blank=True)
    rwa_infidelity = models.FloatField(_("RWA infidelity"), null=True, blank=True)
    exact_infidelity = models.FloatField(_("exact infidelity"), null=True, blank=True)
    rwa_success = models.BooleanField(_("RWA success"), null=True)
    exact_success = models.BooleanField(_("exact success"), null=True)
    duration = models.FloatField(_("duration"), null=True, blank=True)
    evaluations = models.PositiveIntegerField(_("evaluations"), null=True, blank=True)
    method = models.CharField(_("method"), max_length=30, blank=True)
    error = models.CharField(_("error"), max_length=50, blank=True)

    class Meta:
        verbose_name = _("sweep result")
        verbose_name_plural = _("sweep results")
        ordering = ["dimension", "detuning", "seed"]
        constraints = [
            models.UniqueConstraint(
                fields=["run", "dimension", "detuning", "seed"],
                name="pulseman_sweepresult_unique_cell",
            ),
        ]

    def __str__(self):
        return f"{self.run.code} N={self.dimension} delta={self.detuning:g} #{self.goal_index}"

"""LevelScheme model."""

import uuid as uuid_lib

from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _
from simple_history.models import HistoricalRecords
from taggit.managers import TaggableManager

from pulseman.exceptions import ControlError
from pulseman.protocols.system import Coupling, LevelSystem


class LevelScheme(models.Model):
    """
    Stored level scheme: drift energies plus control couplings.

    `couplings` is a list of {"k": int, "j": int, "re": float, "im": float}
    entries, each giving (H_C)_{kj}; the (j, k) entry is its conjugate.
    """

    uuid = models.UUIDField(default=uuid_lib.uuid4, editable=False, unique=True, verbose_name=_("UUID"))

    slug = models.SlugField(_("slug"), max_length=100, unique=True)
    name = models.CharField(_("name"), max_length=200)
    description = models.TextField(_("description"), blank=True)

    energies = models.JSONField(
        _("energies"),
        default=list,
        help_text=_("Drift energies E_0..E_{N-1}, hbar = 1"),
    )
    couplings = models.JSONField(
        _("couplings"),
        default=list,
        blank=True,
        help_text=_('List of {"k", "j", "re", "im"} entries of H_C'),
    )

    keywords = TaggableManager(
        blank=True,
        verbose_name=_("keywords"),
        help_text=_("Comma-separated tags."),
    )

    created_at = models.DateTimeField(_("created at"), auto_now_add=True)
    updated_at = models.DateTimeField(_("updated at"), auto_now=True)

    history = HistoricalRecords()

    class Meta:
        verbose_name = _("level scheme")
        verbose_name_plural = _("level schemes")
        ordering = ["name"]

    def __str__(self):
        return f"{self.slug} - {self.name} (N={len(self.energies or [])})"

    def clean(self):
        super().clean()
        try:
            self.to_system()
        except ControlError as exc:
            raise ValidationError({"couplings": exc.message}) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError({"couplings": _("Malformed coupling entry: %(error)s") % {"error": exc}}) from exc

    def save(self, *args, **kwargs):
        self.full_clean()
        is_new = self._state.adding
        super().save(*args, **kwargs)
        if is_new:
            from pulseman.signals import scheme_created

            scheme_created.send(sender=self.__class__, instance=self, slug=self.slug)

    def to_system(self) -> LevelSystem:
        """Immutable LevelSystem for the stored energies and couplings."""
        couplings = tuple(
            Coupling(int(c["k"]), int(c["j"]), complex(float(c.get("re", 1.0)), float(c.get("im", 0.0))))
            for c in self.couplings or []
        )
        return LevelSystem(tuple(float(e) for e in self.energies or []), couplings)

    @classmethod
    def from_system(cls, system: LevelSystem, **fields) -> "LevelScheme":
        """Unsaved LevelScheme holding `system`."""
        return cls(
            energies=list(system.energies),
            couplings=[
                {"k": c.k, "j": c.j, "re": complex(c.value).real, "im": complex(c.value).imag} for c in system.couplings
            ],
            **fields,
        )

    @property
    def dimension(self) -> int:
        return len(self.energies or [])

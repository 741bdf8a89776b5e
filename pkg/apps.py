from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class PulsemanConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "pulseman"
    verbose_name = _("Pulse control")

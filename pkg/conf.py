"""
Pulseman configuration.

Usage in settings.py:
    PULSEMAN = {
        "GAP_TOL": 1e-6,
        "PROPAGATION_TOL": 1e-12,
        "SIMPLEX": {"restarts": 10},
        "PROPAGATOR_BACKEND": None,  # e.g. "myproject.integrators.MagnusPropagator"
    }
"""

import importlib
import threading
from dataclasses import dataclass, field
from typing import Any

from django.conf import settings

from pulseman.exceptions import ControlError
from pulseman.protocols.control import SimplexConfig

DEFAULT_PROPAGATOR = "pulseman.adapters.dop853.Dop853Propagator"


@dataclass
class PulsemanSettings:
    """Pulseman configuration settings."""

    GAP_TOL: float = 1e-6
    STRICT_NONDEGENERACY: bool = False
    RESONANCE_WINDOW_FACTOR: float = 0.1
    RWA_RATIO_BOUND: float = 1e-2
    SPARSE_DRIVE: bool = False
    PROPAGATION_TOL: float = 1e-12
    INFIDELITY_THRESHOLD: float = 1e-3
    SIMPLEX: dict[str, Any] = field(default_factory=dict)
    SWEEP_WORKERS: int = 1
    OUTPUT_DIR: str = "pulseman-output"
    TRAJECTORY_DIR: str | None = None
    PROPAGATOR_BACKEND: str | None = None

    def simplex_config(self) -> SimplexConfig:
        """SimplexConfig defaults with the SIMPLEX overrides applied."""
        return SimplexConfig.from_dict(self.SIMPLEX)


def get_pulseman_settings() -> PulsemanSettings:
    """Load settings from Django settings."""
    user_settings: dict[str, Any] = getattr(settings, "PULSEMAN", {})
    try:
        return PulsemanSettings(**user_settings)
    except TypeError as exc:
        raise ControlError("INVALID_CONFIG", message=f"Bad PULSEMAN setting: {exc}") from exc


class _LazySettings:
    """Lazy proxy that re-reads settings on every attribute access."""

    def __getattr__(self, name):
        return getattr(get_pulseman_settings(), name)


pulseman_settings = _LazySettings()


# ExactPropagator singleton
_propagator_lock = threading.Lock()
_propagator_instance = None


def get_propagator():
    """
    Return the configured ExactPropagator instance.

    Loads from PULSEMAN["PROPAGATOR_BACKEND"] (dotted path), falling back to
    the built-in DOP853 integrator. If _propagator_instance was set directly
    (e.g. in tests), returns it as-is.
    """
    global _propagator_instance
    if _propagator_instance is not None:
        return _propagator_instance
    backend_path = pulseman_settings.PROPAGATOR_BACKEND or DEFAULT_PROPAGATOR
    with _propagator_lock:
        if _propagator_instance is None:
            module_path, cls_name = backend_path.rsplit(".", 1)
            module = importlib.import_module(module_path)
            cls = getattr(module, cls_name)
            _propagator_instance = cls()
    return _propagator_instance


def reset_propagator():
    """Reset ExactPropagator singleton (for tests)."""
    global _propagator_instance
    _propagator_instance = None

"""
Django Pulseman - state transfer control for multilevel systems.

Usage:
    from pulseman import ControlService, ControlError

    report = ControlService.analyze(system)
    solution = ControlService.solve(system, frequencies, goal)
    solution = ControlService.double_check(problem, solution)
"""


def __getattr__(name):
    if name == "ControlService":
        from pulseman.service import ControlService

        return ControlService
    elif name == "ControlError":
        from pulseman.exceptions import ControlError

        return ControlError
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = ["ControlService", "ControlError"]
__version__ = "0.1.0"

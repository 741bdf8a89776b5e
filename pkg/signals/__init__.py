"""
Pulseman signals.

Signals:
    scheme_created:
        Sent after a new LevelScheme is saved for the first time.

        Kwargs:
            sender: LevelScheme class
            instance: The LevelScheme instance that was created
            slug: str - the scheme slug

        Example handler::

            from pulseman.signals import scheme_created

            def on_scheme_created(sender, instance, slug, **kwargs):
                logger.info("New level scheme: %s", slug)

            scheme_created.connect(on_scheme_created)

    transfer_solved:
        Sent by ControlService.solve() after a transfer has been solved.

        Kwargs:
            sender: ControlService class
            problem: TransferProblem
            solution: TransferSolution (rwa_infidelity set, exact_infidelity None)

    sweep_completed:
        Sent after a persisted sweep has finished and its rows are stored.

        Kwargs:
            sender: SweepRun class
            instance: The SweepRun instance
            errors: int - number of rows that carry an error tag

        Example handler::

            from pulseman.signals import sweep_completed

            def on_sweep_completed(sender, instance, errors, **kwargs):
                if errors:
                    logger.warning("Sweep %s had %d failed cells", instance.code, errors)

            sweep_completed.connect(on_sweep_completed)
"""

from django.dispatch import Signal

scheme_created = Signal()
transfer_solved = Signal()
sweep_completed = Signal()

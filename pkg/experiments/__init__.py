"""Random instances, detuning sweeps and the Rydberg Bell-state scenario."""

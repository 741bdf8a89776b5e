"""Pulseman tests."""

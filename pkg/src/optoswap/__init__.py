"""Pulsed three-interaction optomechanical state swap: Gaussian channel,
phase-space transfer of non-Gaussian states, cooling analytics and oracles."""

__version__ = "0.1.0"

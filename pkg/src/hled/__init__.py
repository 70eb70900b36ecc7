"""Lumped-parameter simulator and calibration toolkit for light-driven
thermopneumatic actuator pixels."""

__version__ = "0.1.0"

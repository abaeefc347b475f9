"""Deterministic simulator and teleop stack for a gyro-driven rolling robot."""

__version__ = "0.1.0"

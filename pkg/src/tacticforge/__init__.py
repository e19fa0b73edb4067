"""Tactic prediction and proof search from recorded (proof state, tactic) pairs."""

__version__ = "0.1.0"

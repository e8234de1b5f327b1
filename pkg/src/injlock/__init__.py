"""Optical computing with injection-locked lasers."""

__version__ = "0.1.0"

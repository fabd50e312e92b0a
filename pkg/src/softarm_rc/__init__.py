"""Reservoir computing with a simulated three-section pneumatic soft arm."""

__version__ = "0.1.0"

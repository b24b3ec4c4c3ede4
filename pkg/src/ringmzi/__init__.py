"""Simulation and calibration toolkit for heralded-photon MZI interference
from micro-ring resonator pair sources."""

__version__ = "0.1.0"

"""Tropical curves, mirror deformations and coamoebas of plane curves."""

__version__ = "0.1.0"

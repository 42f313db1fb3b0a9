"""Dust-aware solar forecasting and desalination plant control.

Two-stage daily pipeline: a hybrid model projects aerosol optical depth
(AOD) from meteorology and its own recent history, a second regressor
maps projected AOD and irradiance conditions to solar efficiency loss,
and a rule layer turns the projection into operating directives. A small
HTTP service exposes the trained pipeline to the dashboard.
"""

__version__ = "0.1.0"

from .errors import DustcastError

__all__ = ["DustcastError", "__version__"]

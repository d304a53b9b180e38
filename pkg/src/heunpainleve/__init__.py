"""Heun class operators, isomonodromic deformations and Painleve equations."""

from .polyalg import INF, RatFunc, degree_at, laurent, substitute_moebius

__all__ = ["INF", "RatFunc", "degree_at", "laurent", "substitute_moebius"]
__version__ = "0.1.0"

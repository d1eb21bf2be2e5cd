"""Constrained transport energy solvers (C++ core bindings)."""

from ._core import (
    GridDensity,
    asymmetry,
    ball_energy_1d,
    ball_energy_nd,
    disk_density,
    interval_energy,
    oracle_energy,
    radial_energy,
    ray_length_bound,
    rescale,
    sharp_example,
    sweep_energy,
    transport_distance_bound,
)

__all__ = [
    "GridDensity",
    "asymmetry",
    "ball_energy_1d",
    "ball_energy_nd",
    "disk_density",
    "interval_energy",
    "oracle_energy",
    "radial_energy",
    "ray_length_bound",
    "rescale",
    "sharp_example",
    "sweep_energy",
    "transport_distance_bound",
]

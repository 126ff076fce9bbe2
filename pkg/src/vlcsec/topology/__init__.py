"""
LED arrangements, coverage and linking strategies.
"""

from .lattice import (
    LatticeKind,
    RoomLayout,
    LatticeSpec,
    coverage_radius,
    max_triangular_side,
    triangular_lattice,
    square_lattice,
    build_leds,
    nearest_neighbor_distances,
)
from .linking import Strategy, covered_users, smart_link, assign_groups

__all__ = [
    "LatticeKind",
    "RoomLayout",
    "LatticeSpec",
    "coverage_radius",
    "max_triangular_side",
    "triangular_lattice",
    "square_lattice",
    "build_leds",
    "nearest_neighbor_distances",
    "Strategy",
    "covered_users",
    "smart_link",
    "assign_groups",
]

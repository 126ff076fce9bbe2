"""
Self-checks that compare library routines against independent references.
"""

from .unionfind import UnionFind
from .checks import (
    ORACLES,
    OracleReport,
    check_alloc,
    check_azimuth,
    check_blockage,
    check_linking,
    check_sinr,
    closest_approach_margin,
    grid_allocations,
    reference_sinr,
    run_oracle,
    sampled_blockage,
    union_find_clusters,
)

__all__ = [
    "UnionFind",
    "ORACLES",
    "OracleReport",
    "check_alloc",
    "check_azimuth",
    "check_blockage",
    "check_linking",
    "check_sinr",
    "closest_approach_margin",
    "grid_allocations",
    "reference_sinr",
    "run_oracle",
    "sampled_blockage",
    "union_find_clusters",
]

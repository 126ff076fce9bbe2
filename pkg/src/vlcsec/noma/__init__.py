"""
Power-domain NOMA: power allocation, SIC ordering, SINR and secrecy rates.
"""

from .rates import (
    PHYSICAL,
    LITERAL,
    INTERFERENCE_SETS,
    UserSet,
    PowerAllocation,
    GroupAssignment,
    RateReport,
    fixed_allocation,
    sic_order,
    user_sinr,
    eve_sinr,
    rate,
    secrecy_terms,
)
from .allocation import (
    SolverSettings,
    GroupObjective,
    group_objective,
    project_simplex,
    project_monotone,
    is_feasible,
    optimize_allocation,
    vertex_starts,
    lattice_start,
)

__all__ = [
    "PHYSICAL",
    "LITERAL",
    "INTERFERENCE_SETS",
    "UserSet",
    "PowerAllocation",
    "GroupAssignment",
    "RateReport",
    "fixed_allocation",
    "sic_order",
    "user_sinr",
    "eve_sinr",
    "rate",
    "secrecy_terms",
    "SolverSettings",
    "GroupObjective",
    "group_objective",
    "project_simplex",
    "project_monotone",
    "is_feasible",
    "optimize_allocation",
    "vertex_starts",
    "lattice_start",
]

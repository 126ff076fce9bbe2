"""
Exception hierarchy shared by every vlcsec package.
"""

from __future__ import annotations

from typing import Optional


class VlcsecError(Exception):
    """Base class for all simulator errors."""


class ParallelLinePlane(VlcsecError):
    """The line direction is (numerically) parallel to the plane."""


class DegenerateVertical(VlcsecError):
    """LED sits exactly above the body axis; the azimuth is undefined."""


class InvalidZeta(VlcsecError, ValueError):
    """Fixed NOMA power ratio outside (0.5, 1]."""


class LatticeConstraintViolated(VlcsecError, ValueError):
    """Triangular lattice side length breaks the coverage bound."""


class SolverNonConvergence(VlcsecError):
    """Power-allocation solver hit its iteration cap."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ConfigError(VlcsecError):
    """Base for configuration problems (CLI exit code 2)."""


class SchemaError(ConfigError):
    """Configuration does not match the schema."""

    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class RangeError(ConfigError):
    """Configuration is well-formed but a value is out of its admissible range."""

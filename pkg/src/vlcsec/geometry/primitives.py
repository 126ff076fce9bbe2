"""
Geometric value types: points/vectors, planes and body cylinders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class Vec3:
    """3D point or vector in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"Vec3 components must be finite, got {self}")

    @classmethod
    def from_iter(cls, values: Iterable[float]) -> "Vec3":
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, scalar: float) -> "Vec3":
        return Vec3(self.x * scalar, self.y * scalar, self.z * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def horizontal(self) -> "Vec3":
        """Projection onto the XOY plane."""
        return Vec3(self.x, self.y, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class Plane:
    point: Vec3
    normal: Vec3

    def __post_init__(self):
        if self.normal.norm() <= 0.0:
            raise ValueError("Plane normal must be non-zero")

    def residual(self, p: Vec3) -> float:
        """Signed distance-like residual (P - point) . normal."""
        return (p - self.point).dot(self.normal)


@dataclass(frozen=True)
class BodyCylinder:
    """Vertical body cylinder standing on the floor, described by its top center."""

    top_center: Vec3
    radius: float
    height: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"Body radius must be positive, got {self.radius}")
        if self.height <= 0:
            raise ValueError(f"Body height must be positive, got {self.height}")
        if not math.isclose(self.top_center.z, self.height, rel_tol=0.0, abs_tol=1e-12):
            raise ValueError(
                f"Top center z ({self.top_center.z}) must equal the body height ({self.height})"
            )

    def contains(self, p: Vec3) -> bool:
        """Closed point-in-cylinder test."""
        if p.z < 0.0 or p.z > self.height:
            return False
        dx = p.x - self.top_center.x
        dy = p.y - self.top_center.y
        return dx * dx + dy * dy <= self.radius * self.radius

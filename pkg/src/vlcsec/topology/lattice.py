"""
Room layout and LED arrangements: triangular lattice, square lattice, explicit lists.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..geometry import Vec3
from ..shared.errors import LatticeConstraintViolated

logger = logging.getLogger("vlcsec.topology")

# Points this close outside a wall still count as inside.
WALL_TOL = 1e-9


class LatticeKind(str, Enum):
    TRIANGULAR = "triangular"
    SQUARE = "square"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class RoomLayout:
    length: float
    width: float
    height: float
    device_height: float
    led_positions: Tuple[Vec3, ...] = ()

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ValueError(f"room must have positive extent, got {self.length}x{self.width}")
        if not 0.0 < self.device_height < self.height:
            raise ValueError(
                f"device plane {self.device_height} must lie strictly between floor and "
                f"ceiling {self.height}"
            )
        for p in self.led_positions:
            if not self.contains_xy(p.x, p.y):
                raise ValueError(f"LED {p} lies outside the room")
            if not math.isclose(p.z, self.height, abs_tol=1e-12):
                raise ValueError(f"LED {p} is not on the ceiling z={self.height}")

    def contains_xy(self, x: float, y: float) -> bool:
        return (
            -WALL_TOL <= x <= self.length + WALL_TOL and -WALL_TOL <= y <= self.width + WALL_TOL
        )

    def with_leds(self, leds: Iterable[Vec3]) -> "RoomLayout":
        return RoomLayout(self.length, self.width, self.height, self.device_height, tuple(leds))

    def led_array(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.led_positions], dtype=float).reshape(-1, 3)

    @property
    def drop(self) -> float:
        """Vertical distance from the ceiling to the device plane."""
        return self.height - self.device_height


@dataclass(frozen=True)
class LatticeSpec:
    kind: LatticeKind
    side: float
    anchor: Tuple[float, float]
    points: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind is not LatticeKind.EXPLICIT and self.side <= 0:
            raise ValueError(f"lattice side must be positive, got {self.side}")
        if self.kind is LatticeKind.EXPLICIT and not self.points:
            raise ValueError("explicit arrangement needs at least one LED position")


def coverage_radius(height: float, device_height: float, half_angle: float) -> float:
    """Radius on the device plane inside which an LED covers users."""
    if height <= device_height:
        raise ValueError(f"ceiling {height} must be above the device plane {device_height}")
    return (height - device_height) * math.tan(half_angle)


def max_triangular_side(height: float, device_height: float, half_angle: float) -> float:
    """Largest side for which neighbouring coverage disks still close every triangle."""
    return math.sqrt(3.0) * coverage_radius(height, device_height, half_angle)


def _row_range(anchor: float, step: float, upper: float) -> range:
    lo = math.ceil((-WALL_TOL - anchor) / step)
    hi = math.floor((upper + WALL_TOL - anchor) / step)
    return range(lo, hi + 1)


def _sorted_vecs(points: Iterable[Tuple[float, float]], z: float) -> List[Vec3]:
    return [Vec3(x, y, z) for x, y in sorted(points, key=lambda p: (p[1], p[0]))]


def triangular_lattice(
    room: RoomLayout, side: float, anchor: Tuple[float, float], half_angle: float
) -> List[Vec3]:
    """LEDs on equilateral-triangle vertices, odd rows shifted by half a side."""
    bound = max_triangular_side(room.height, room.device_height, half_angle)
    if side > bound:
        raise LatticeConstraintViolated(
            f"side {side:.4g} m exceeds the coverage bound {bound:.4g} m"
        )
    ax, ay = anchor
    pitch = side * math.sqrt(3.0) / 2.0
    points = []
    for j in _row_range(ay, pitch, room.width):
        y = ay + j * pitch
        x0 = ax + (side / 2.0 if j % 2 else 0.0)
        for i in _row_range(x0, side, room.length):
            x = x0 + i * side
            if room.contains_xy(x, y):
                points.append((x, y))
    leds = _sorted_vecs(points, room.height)
    logger.debug("triangular lattice side=%.3f: %d LEDs", side, len(leds))
    return leds


def square_lattice(room: RoomLayout, side: float, anchor: Tuple[float, float]) -> List[Vec3]:
    ax, ay = anchor
    points = [
        (ax + i * side, ay + j * side)
        for j in _row_range(ay, side, room.width)
        for i in _row_range(ax, side, room.length)
        if room.contains_xy(ax + i * side, ay + j * side)
    ]
    return _sorted_vecs(points, room.height)


def build_leds(
    room: RoomLayout, spec: LatticeSpec, half_angle: Optional[float] = None
) -> List[Vec3]:
    """Dispatch on the arrangement kind."""
    if spec.kind is LatticeKind.TRIANGULAR:
        if half_angle is None:
            raise ValueError("triangular lattice needs the LED half angle")
        return triangular_lattice(room, spec.side, spec.anchor, half_angle)
    if spec.kind is LatticeKind.SQUARE:
        return square_lattice(room, spec.side, spec.anchor)
    for x, y in spec.points:
        if not room.contains_xy(x, y):
            raise ValueError(f"LED at ({x}, {y}) lies outside the room")
    return _sorted_vecs(spec.points, room.height)


def nearest_neighbor_distances(leds: Sequence[Vec3]) -> np.ndarray:
    pts = np.array([[p.x, p.y] for p in leds], dtype=float)
    if len(pts) < 2:
        return np.empty(0)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    return dist.min(axis=1)

"""
Channel-side value types: LED and photodiode parameters, device orientation, receivers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from ..geometry import BodyCylinder, Vec3, body_top_center

ReceiverId = Union[int, str]


def lambertian_order(half_angle: float) -> float:
    """Lambertian order m = -ln 2 / ln(cos(theta_1/2))."""
    if not 0.0 < half_angle < math.pi / 2:
        raise ValueError(f"half angle must lie in (0, pi/2), got {half_angle}")
    return -math.log(2.0) / math.log(math.cos(half_angle))


def wrap_azimuth(omega: float) -> float:
    """Map an angle into [-pi, pi)."""
    wrapped = math.fmod(omega + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class LedParams:
    half_angle: float
    optical_power: float = 0.25

    def __post_init__(self):
        lambertian_order(self.half_angle)

    @property
    def lambertian_order(self) -> float:
        return lambertian_order(self.half_angle)


@dataclass(frozen=True)
class PdParams:
    area: float
    fov: float
    refractive_index: float
    responsivity: float = 1.0

    def __post_init__(self):
        if self.area <= 0:
            raise ValueError(f"PD area must be positive, got {self.area}")
        if not 0.0 < self.fov <= math.pi / 2:
            raise ValueError(f"PD field of view must lie in (0, pi/2], got {self.fov}")
        if not 1.0 < self.refractive_index < 2.0:
            raise ValueError(f"refractive index must lie in (1, 2), got {self.refractive_index}")
        if self.responsivity <= 0:
            raise ValueError(f"responsivity must be positive, got {self.responsivity}")


@dataclass(frozen=True)
class Orientation:
    """Device normal: azimuth omega in [-pi, pi), polar lambda in [0, pi/2]."""

    azimuth: float
    polar: float

    def __post_init__(self):
        if not -math.pi <= self.azimuth < math.pi:
            raise ValueError(f"azimuth must lie in [-pi, pi), got {self.azimuth}")
        if not 0.0 <= self.polar <= math.pi / 2:
            raise ValueError(f"polar angle must lie in [0, pi/2], got {self.polar}")


@dataclass(frozen=True)
class Receiver:
    """A photodiode held by a user (int index) or the eavesdropper ("E")."""

    id: ReceiverId
    pd_position: Vec3
    orientation: Orientation
    body: BodyCylinder = field(compare=False)

    @classmethod
    def build(
        cls,
        rid: ReceiverId,
        pd_position: Vec3,
        orientation: Orientation,
        l_d: float,
        height: float,
        radius: float,
    ) -> "Receiver":
        top = body_top_center(pd_position, orientation.azimuth, l_d, height)
        return cls(rid, pd_position, orientation, BodyCylinder(top, radius, height))

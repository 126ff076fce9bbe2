"""
Line-of-sight VLC channel gain with Lambertian emission, concentrator gain,
orientation-dependent incidence and body blockage.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Tuple

import numpy as np

from ..geometry import ALIGNED, BodyCylinder, Vec3, is_blocked, occlusion_mask
from .models import LedParams, Orientation, PdParams, Receiver, wrap_azimuth

logger = logging.getLogger("vlcsec.channel")

POLAR_MEAN = math.radians(29.67)
POLAR_STD = math.radians(7.78)


def incidence_cos(S: Vec3, D: Vec3, o: Orientation) -> float:
    """cos(psi) of light from S arriving at a device at D with orientation o."""
    d = (S - D).norm()
    if d == 0.0:
        raise ValueError("LED and photodiode positions coincide")
    sin_l = math.sin(o.polar)
    return (
        (S.x - D.x) / d * sin_l * math.cos(o.azimuth)
        + (S.y - D.y) / d * sin_l * math.sin(o.azimuth)
        + (S.z - D.z) / d * math.cos(o.polar)
    )


def concentrator_gain(psi: float, fov: float, eta: float) -> float:
    if 0.0 <= psi <= fov:
        return eta * eta / math.sin(fov) ** 2
    return 0.0


def _los_gain(S: Vec3, D: Vec3, cos_psi: float, led: LedParams, pd: PdParams) -> float:
    if cos_psi <= 0.0:
        return 0.0
    d = (S - D).norm()
    m = led.lambertian_order
    cos_theta = (S.z - D.z) / d
    psi = math.acos(min(1.0, cos_psi))
    g = concentrator_gain(psi, pd.fov, pd.refractive_index)
    if g == 0.0:
        return 0.0
    return (
        pd.area * (m + 1.0) * pd.responsivity / (2.0 * math.pi)
        * cos_theta**m
        * cos_psi / (d * d)
        * g
    )


def channel_gain(
    S: Vec3,
    rx: Receiver,
    all_bodies: Iterable[BodyCylinder],
    led: LedParams,
    pd: PdParams,
    rectangle: str = ALIGNED,
) -> float:
    """Channel gain h from the LED at S to receiver rx; zero when any body blocks."""
    D = rx.pd_position
    gain = _los_gain(S, D, incidence_cos(S, D, rx.orientation), led, pd)
    if gain == 0.0:
        return 0.0
    for body in all_bodies:
        if is_blocked(S, D, body, rectangle):
            return 0.0
    return gain


def sample_orientation(
    rng: np.random.Generator, polar_mean: float = POLAR_MEAN, polar_std: float = POLAR_STD
) -> Orientation:
    """omega ~ U[-pi, pi), lambda ~ N(mean, std) clamped into [0, pi/2]."""
    omega = float(rng.uniform(-math.pi, math.pi))
    polar = float(np.clip(rng.normal(polar_mean, polar_std), 0.0, math.pi / 2))
    return Orientation(wrap_azimuth(omega), polar)


def optimal_azimuth(S: Vec3, D: Vec3) -> float:
    """Azimuth that turns the device normal toward the LED's horizontal bearing."""
    return wrap_azimuth(math.atan2(S.y - D.y, S.x - D.x))


def estimated_channel_gain(
    S: Vec3, D: Vec3, led: LedParams, pd: PdParams, polar_mean: float = POLAR_MEAN
) -> float:
    """Blockage-free gain at the expected polar angle and the gain-maximizing azimuth."""
    o = Orientation(optimal_azimuth(S, D), polar_mean)
    return _los_gain(S, D, incidence_cos(S, D, o), led, pd)


def _los_gain_array(
    leds: np.ndarray, devices: np.ndarray, cos_psi: np.ndarray, led: LedParams, pd: PdParams
) -> np.ndarray:
    diff = leds[None, :, :] - devices[:, None, :]
    d2 = np.sum(diff * diff, axis=-1)
    d = np.sqrt(d2)
    m = led.lambertian_order
    cos_theta = diff[..., 2] / d
    psi = np.arccos(np.clip(cos_psi, -1.0, 1.0))
    g = np.where(
        (cos_psi > 0.0) & (psi <= pd.fov),
        pd.refractive_index**2 / math.sin(pd.fov) ** 2,
        0.0,
    )
    base = pd.area * (m + 1.0) * pd.responsivity / (2.0 * math.pi)
    with np.errstate(invalid="ignore"):
        gain = base * np.power(np.clip(cos_theta, 0.0, None), m) * cos_psi / d2 * g
    return np.where(g > 0.0, gain, 0.0)


def _cos_psi_array(leds: np.ndarray, devices: np.ndarray, orientations: np.ndarray) -> np.ndarray:
    diff = leds[None, :, :] - devices[:, None, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    omega = orientations[:, 0][:, None]
    polar = orientations[:, 1][:, None]
    return (
        diff[..., 0] / d * np.sin(polar) * np.cos(omega)
        + diff[..., 1] / d * np.sin(polar) * np.sin(omega)
        + diff[..., 2] / d * np.cos(polar)
    )


def gain_matrix(
    leds: np.ndarray,
    devices: np.ndarray,
    orientations: np.ndarray,
    tops: np.ndarray,
    led: LedParams,
    pd: PdParams,
    body_radius: float,
    body_height: float,
    rectangle: str = ALIGNED,
) -> Tuple[np.ndarray, np.ndarray]:
    """Gains (receivers x LEDs) and the per-link "blocked by any body" flags.

    orientations is (receivers, 2) with columns (omega, lambda); tops holds every
    body's top center, including the receiver's own.
    """
    leds = np.asarray(leds, dtype=float).reshape(-1, 3)
    devices = np.asarray(devices, dtype=float).reshape(-1, 3)
    orientations = np.asarray(orientations, dtype=float).reshape(-1, 2)
    gains = _los_gain_array(leds, devices, _cos_psi_array(leds, devices, orientations), led, pd)
    if len(tops):
        blocked = occlusion_mask(
            leds, devices, tops, body_radius, body_height, rectangle
        ).any(axis=-1)
    else:
        blocked = np.zeros(gains.shape, dtype=bool)
    return np.where(blocked, 0.0, gains), blocked


def estimated_gain_matrix(
    leds: np.ndarray,
    devices: np.ndarray,
    led: LedParams,
    pd: PdParams,
    polar_mean: Optional[float] = None,
) -> np.ndarray:
    """Estimated gains (users x LEDs) from positions only: mean polar angle, best azimuth."""
    polar_mean = POLAR_MEAN if polar_mean is None else polar_mean
    leds = np.asarray(leds, dtype=float).reshape(-1, 3)
    devices = np.asarray(devices, dtype=float).reshape(-1, 3)
    diff = leds[None, :, :] - devices[:, None, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    horizontal = np.hypot(diff[..., 0], diff[..., 1])
    cos_psi = horizontal / d * math.sin(polar_mean) + diff[..., 2] / d * math.cos(polar_mean)
    return _los_gain_array(leds, devices, cos_psi, led, pd)

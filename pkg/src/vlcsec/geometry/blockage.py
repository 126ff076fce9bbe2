"""
Body blockage geometry: does a body cylinder occlude the LED -> photodiode segment?

Two intersection tests decide blockage. The segment is intersected with the
horizontal plane through the cylinder top (disk test) and with the vertical
plane through the top center whose normal is the horizontal projection of the
light direction (rectangle test against the cylinder's projected silhouette).
"""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np

from ..shared.errors import DegenerateVertical, ParallelLinePlane
from .primitives import BodyCylinder, Plane, Vec3

logger = logging.getLogger("vlcsec.geometry")

# Relative tolerance on |v_t . n| / (|v_t| |n|).
EPS_PARALLEL = 1e-12

UP = Vec3(0.0, 0.0, 1.0)

# How the rectangle angle is chosen. "aligned" turns the rectangle into the
# projection plane (its horizontal edge perpendicular to the ray); "literal" uses
# the first-quadrant azimuth from the LED to the body axis.
ALIGNED = "aligned"
LITERAL = "literal"
RECTANGLE_MODES = (ALIGNED, LITERAL)


def line_plane_intersection(M: Vec3, v_t: Vec3, plane: Plane) -> Vec3:
    """Intersect the line through M with direction v_t and the plane.

    P = M + ((N - M) . v_s / (v_s . v_t)) v_t, with N, v_s the plane point and normal.
    """
    v_s = plane.normal
    denom = v_s.dot(v_t)
    scale = v_s.norm() * v_t.norm()
    if scale == 0.0 or abs(denom) < EPS_PARALLEL * scale:
        raise ParallelLinePlane(f"direction {v_t} is parallel to plane with normal {v_s}")
    d = (plane.point - M).dot(v_s) / denom
    return M + d * v_t


def segment_parameter(S: Vec3, a: Vec3, P: Vec3) -> float:
    """Parameter t of a point P = S + t a lying on the line."""
    return (P - S).dot(a) / a.dot(a)


def rect_projection_vertices(body: BodyCylinder, phi: float) -> Tuple[Vec3, Vec3, Vec3, Vec3]:
    """Four vertices of the cylinder's projected rectangle for azimuth phi.

    Top pair at z = H, bottom pair at z = 0, horizontal offsets (+r cos phi, -r sin phi)
    and their negation around the top center.
    """
    u = body.top_center
    ox = body.radius * math.cos(phi)
    oy = body.radius * math.sin(phi)
    h = body.height
    return (
        Vec3(u.x + ox, u.y - oy, h),
        Vec3(u.x - ox, u.y + oy, h),
        Vec3(u.x - ox, u.y + oy, 0.0),
        Vec3(u.x + ox, u.y - oy, 0.0),
    )


def azimuth_to_body(S: Vec3, U: Vec3) -> float:
    """First-quadrant azimuth arctan(|y_S - y_U| / |x_S - x_U|), in [0, pi/2]."""
    dx = abs(S.x - U.x)
    dy = abs(S.y - U.y)
    if dx == 0.0 and dy == 0.0:
        raise DegenerateVertical(f"LED {S} is directly above the body axis at {U}")
    return math.atan2(dy, dx)


def body_top_center(D: Vec3, omega: float, l_d: float, H: float) -> Vec3:
    """Top center U of the body holding a device at D with azimuth omega."""
    if H <= D.z:
        raise ValueError(f"Body height {H} must exceed the device height {D.z}")
    reach = math.sqrt(l_d * l_d + (H - D.z) ** 2)
    return Vec3(D.x + reach * math.cos(omega), D.y + reach * math.sin(omega), H)


def _inside_rectangle(B: Vec3, vertices: Tuple[Vec3, Vec3, Vec3, Vec3]) -> bool:
    b1, b2, b3, b4 = vertices
    first = (b2 - b1).cross(B - b1).dot((b4 - b3).cross(B - b3))
    second = (b3 - b2).cross(B - b2).dot((b1 - b4).cross(B - b4))
    return first >= 0.0 and second >= 0.0


def rectangle_angle(S: Vec3, U: Vec3, a_h: Vec3, mode: str = ALIGNED) -> float:
    """Angle fed to rect_projection_vertices for a ray with horizontal direction a_h."""
    if mode == LITERAL:
        return azimuth_to_body(S, U)
    if mode == ALIGNED:
        return math.atan2(a_h.x, a_h.y)
    raise ValueError(f"unknown rectangle mode {mode!r}")


def is_blocked(S: Vec3, D: Vec3, body: BodyCylinder, mode: str = ALIGNED) -> bool:
    """True when the segment S -> D is occluded by the body cylinder."""
    a = D - S
    U = body.top_center

    Q = line_plane_intersection(S, a, Plane(U, UP))
    t_q = segment_parameter(S, a, Q)
    if 0.0 <= t_q <= 1.0 and (Q - U).norm() <= body.radius:
        return True

    try:
        azimuth_to_body(S, U)
    except DegenerateVertical:
        return False

    a_h = a.horizontal()
    if a_h.norm() <= EPS_PARALLEL * a.norm():
        # vertical ray: only the disk test applies
        return False
    try:
        B = line_plane_intersection(S, a, Plane(U, a_h))
    except ParallelLinePlane:
        return False
    t_b = segment_parameter(S, a, B)
    if not 0.0 <= t_b <= 1.0:
        return False
    phi = rectangle_angle(S, U, a_h, mode)
    return _inside_rectangle(B, rect_projection_vertices(body, phi))


def blocked_batch(
    S: np.ndarray,
    D: np.ndarray,
    U: np.ndarray,
    radius: float,
    height: float,
    mode: str = ALIGNED,
) -> np.ndarray:
    """Vectorized is_blocked over broadcastable (..., 3) arrays of LEDs, devices and top centers."""
    if mode not in RECTANGLE_MODES:
        raise ValueError(f"unknown rectangle mode {mode!r}")
    S, D, U = np.broadcast_arrays(
        np.asarray(S, dtype=float), np.asarray(D, dtype=float), np.asarray(U, dtype=float)
    )
    a = D - S
    az = a[..., 2]

    with np.errstate(divide="ignore", invalid="ignore"):
        t_q = (height - S[..., 2]) / az
        q = S + t_q[..., None] * a
        disk = np.sum((q[..., :2] - U[..., :2]) ** 2, axis=-1) <= radius * radius
        cond1 = np.isfinite(t_q) & (t_q >= 0.0) & (t_q <= 1.0) & disk

        dxy = S[..., :2] - U[..., :2]
        degenerate = (dxy[..., 0] == 0.0) & (dxy[..., 1] == 0.0)
        if mode == LITERAL:
            phi = np.arctan2(np.abs(dxy[..., 1]), np.abs(dxy[..., 0]))
        else:
            phi = np.arctan2(a[..., 0], a[..., 1])

        a_h = a.copy()
        a_h[..., 2] = 0.0
        h2 = np.sum(a_h * a_h, axis=-1)
        a_norm = np.sqrt(np.sum(a * a, axis=-1))
        parallel = np.sqrt(h2) <= EPS_PARALLEL * a_norm
        t_b = np.sum((U - S) * a_h, axis=-1) / h2
        b = S + t_b[..., None] * a

        off = np.stack([radius * np.cos(phi), -radius * np.sin(phi), np.zeros_like(phi)], axis=-1)
        top = U.copy()
        bottom = U.copy()
        bottom[..., 2] = 0.0
        b1 = top + off
        b2 = top - off
        b3 = bottom - off
        b4 = bottom + off

        first = np.sum(np.cross(b2 - b1, b - b1) * np.cross(b4 - b3, b - b3), axis=-1)
        second = np.sum(np.cross(b3 - b2, b - b2) * np.cross(b1 - b4, b - b4), axis=-1)
        cond2 = (
            ~degenerate
            & ~parallel
            & (t_b >= 0.0)
            & (t_b <= 1.0)
            & (first >= 0.0)
            & (second >= 0.0)
        )
    return cond1 | cond2


def occlusion_mask(
    leds: np.ndarray,
    devices: np.ndarray,
    tops: np.ndarray,
    radius: float,
    height: float,
    mode: str = ALIGNED,
) -> np.ndarray:
    """Blockage flags shaped (receivers, leds, bodies) for (N,3), (R,3), (B,3) inputs."""
    leds = np.asarray(leds, dtype=float).reshape(-1, 3)
    devices = np.asarray(devices, dtype=float).reshape(-1, 3)
    tops = np.asarray(tops, dtype=float).reshape(-1, 3)
    mask = blocked_batch(
        leds[None, :, None, :],
        devices[:, None, None, :],
        tops[None, None, :, :],
        radius,
        height,
        mode,
    )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "blocked links: %d of %d", int(mask.any(axis=-1).sum()), mask.shape[0] * mask.shape[1]
        )
    return mask

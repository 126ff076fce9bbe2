"""
Geometry kernel: vectors, planes, body cylinders and the blockage test.
"""

from .primitives import Vec3, Plane, BodyCylinder
from .blockage import (
    EPS_PARALLEL,
    ALIGNED,
    LITERAL,
    RECTANGLE_MODES,
    line_plane_intersection,
    segment_parameter,
    rect_projection_vertices,
    azimuth_to_body,
    rectangle_angle,
    is_blocked,
    body_top_center,
    blocked_batch,
    occlusion_mask,
)

__all__ = [
    "Vec3",
    "Plane",
    "BodyCylinder",
    "EPS_PARALLEL",
    "ALIGNED",
    "LITERAL",
    "RECTANGLE_MODES",
    "line_plane_intersection",
    "segment_parameter",
    "rect_projection_vertices",
    "azimuth_to_body",
    "rectangle_angle",
    "is_blocked",
    "body_top_center",
    "blocked_batch",
    "occlusion_mask",
]

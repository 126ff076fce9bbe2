import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlcsec.geometry import (
    ALIGNED,
    LITERAL,
    BodyCylinder,
    Plane,
    Vec3,
    azimuth_to_body,
    blocked_batch,
    body_top_center,
    is_blocked,
    line_plane_intersection,
    occlusion_mask,
    rect_projection_vertices,
)
from vlcsec.oracle import closest_approach_margin
from vlcsec.shared.errors import DegenerateVertical, ParallelLinePlane

coord = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)


def body_at(x, y, r=0.2, H=1.6):
    return BodyCylinder(Vec3(x, y, H), r, H)


class TestVec3:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Vec3(float("nan"), 0.0, 0.0)
        with pytest.raises(ValueError):
            Vec3(0.0, float("inf"), 0.0)

    @given(coord, coord, coord, coord, coord, coord)
    def test_cross_is_orthogonal(self, ax, ay, az, bx, by, bz):
        a, b = Vec3(ax, ay, az), Vec3(bx, by, bz)
        c = a.cross(b)
        scale = max(1.0, a.norm() * b.norm()) * max(1.0, a.norm(), b.norm())
        assert abs(c.dot(a)) <= 1e-9 * scale
        assert abs(c.dot(b)) <= 1e-9 * scale

    def test_horizontal_drops_z(self):
        assert Vec3(1.0, 2.0, 3.0).horizontal() == Vec3(1.0, 2.0, 0.0)


class TestBodyCylinder:
    def test_top_center_must_sit_at_height(self):
        with pytest.raises(ValueError):
            BodyCylinder(Vec3(0, 0, 1.5), 0.2, 1.6)

    def test_contains_closed(self):
        body = body_at(0.0, 0.0)
        assert body.contains(Vec3(0.2, 0.0, 1.6))
        assert not body.contains(Vec3(0.21, 0.0, 1.0))
        assert not body.contains(Vec3(0.0, 0.0, 1.7))


class TestLinePlaneIntersection:
    def test_axis_aligned_drop(self):
        p = line_plane_intersection(
            Vec3(0, 0, 1), Vec3(0, 0, -1), Plane(Vec3(0, 0, 0), Vec3(0, 0, 1))
        )
        assert p == Vec3(0.0, 0.0, 0.0)

    def test_vertical_line_onto_body_top(self):
        p = line_plane_intersection(
            Vec3(1, 2, 3), Vec3(0, 0, -1), Plane(Vec3(5, 5, 1.6), Vec3(0, 0, 1))
        )
        assert (p.x, p.y, p.z) == pytest.approx((1.0, 2.0, 1.6))

    def test_oblique_plane_residual(self):
        M, v = Vec3(0, 0, 4), Vec3(1, 1, -4)
        plane = Plane(Vec3(0.5, 0.5, 0), Vec3(1, 1, 0))
        p = line_plane_intersection(M, v, plane)
        assert abs(plane.residual(p)) < 1e-9
        assert (p - M).cross(v).norm() <= 1e-9 * v.norm() * (p - M).norm()
        # independent solve of M + t v on the plane
        A = np.array([[1.0, 1.0, 0.0]])
        t = float((A @ np.array([0.5, 0.5, 0.0]) - A @ M.as_array()) / (A @ v.as_array()))
        assert p.as_array() == pytest.approx(M.as_array() + t * v.as_array())

    def test_parallel_raises(self):
        with pytest.raises(ParallelLinePlane):
            line_plane_intersection(
                Vec3(0, 0, 4), Vec3(1, 0, 0), Plane(Vec3(0, 0, 1.6), Vec3(0, 0, 1))
            )


class TestRectProjectionVertices:
    def test_phi_zero(self):
        b1, b2, b3, b4 = rect_projection_vertices(body_at(2.0, 3.0), 0.0)
        assert b1.as_array() == pytest.approx([2.2, 3.0, 1.6])
        assert b2.as_array() == pytest.approx([1.8, 3.0, 1.6])
        assert b3.as_array() == pytest.approx([1.8, 3.0, 0.0])
        assert b4.as_array() == pytest.approx([2.2, 3.0, 0.0])

    def test_phi_right_angle(self):
        b1, b2, b3, b4 = rect_projection_vertices(body_at(2.0, 3.0), math.pi / 2)
        assert b1.as_array() == pytest.approx([2.0, 2.8, 1.6])
        assert b2.as_array() == pytest.approx([2.0, 3.2, 1.6])
        assert b3.as_array() == pytest.approx([2.0, 3.2, 0.0])
        assert b4.as_array() == pytest.approx([2.0, 2.8, 0.0])

    def test_diagonal_offsets(self):
        b1, b2, _, _ = rect_projection_vertices(body_at(10.0, 10.0), math.pi / 4)
        assert b1.x - 10.0 == pytest.approx(0.1414, abs=1e-4)
        assert b1.y - 10.0 == pytest.approx(-0.1414, abs=1e-4)
        assert b2.x - 10.0 == pytest.approx(-0.1414, abs=1e-4)

    @given(st.floats(min_value=-math.pi, max_value=math.pi, exclude_max=True))
    def test_always_rectangle(self, phi):
        b1, b2, b3, b4 = rect_projection_vertices(body_at(5.0, 7.0), phi)
        assert (b2 - b1).norm() == pytest.approx((b3 - b4).norm())
        assert (b3 - b2).norm() == pytest.approx((b4 - b1).norm())
        assert abs((b2 - b1).dot(b3 - b2)) <= 1e-12


class TestAzimuthToBody:
    def test_equal_offsets(self):
        assert azimuth_to_body(Vec3(0, 0, 4), Vec3(1, 1, 1.6)) == pytest.approx(math.pi / 4)

    def test_aligned_with_x(self):
        assert azimuth_to_body(Vec3(0, 0, 4), Vec3(2, 0, 1.6)) == 0.0

    def test_reference_room(self):
        got = azimuth_to_body(Vec3(20, 20, 3.98), Vec3(13.4, 16, 1.6))
        assert got == pytest.approx(math.atan(4 / 6.6))
        assert got == pytest.approx(0.5449, abs=1e-4)

    def test_directly_above_raises(self):
        with pytest.raises(DegenerateVertical):
            azimuth_to_body(Vec3(3, 4, 3.98), Vec3(3, 4, 1.6))


class TestBodyTopCenter:
    @pytest.mark.parametrize(
        "omega, expected",
        [(0.0, (10.85, 10.0)), (math.pi, (9.15, 10.0)), (math.pi / 2, (10.0, 10.85))],
    )
    def test_reach(self, omega, expected):
        u = body_top_center(Vec3(10, 10, 0.85), omega, 0.4, 1.6)
        assert (u.x, u.y, u.z) == pytest.approx((*expected, 1.6))

    def test_body_must_be_taller_than_device(self):
        with pytest.raises(ValueError):
            body_top_center(Vec3(0, 0, 0.85), 0.0, 0.4, 0.8)


class TestIsBlocked:
    def test_ray_down_the_axis(self):
        body = body_at(10.0, 10.0)
        assert is_blocked(Vec3(10, 10, 3.98), Vec3(10, 10.1, 0.85), body)

    def test_far_away_segment(self):
        body = body_at(10.0, 10.0)
        assert not is_blocked(Vec3(30, 30, 3.98), Vec3(14, 13, 0.85), body)

    def test_through_the_side(self):
        # ray from an LED 5 m behind the body down to a device 0.5 m in front of it
        body = body_at(10.0, 10.0)
        assert is_blocked(Vec3(5, 10, 3.98), Vec3(10.5, 10, 0.85), body)

    def test_passes_beside(self):
        body = body_at(10.0, 10.0)
        assert not is_blocked(Vec3(5, 10.5, 3.98), Vec3(10.5, 10.5, 0.85), body)

    def test_segment_not_line(self):
        # the extended line would cross the body but the photodiode sits before it
        body = body_at(10.0, 10.0)
        assert not is_blocked(Vec3(5, 10, 3.98), Vec3(9.0, 10, 0.85), body)

    def test_directly_above_skips_rectangle(self):
        body = body_at(10.0, 10.0)
        assert not is_blocked(Vec3(10, 10, 3.98), Vec3(12, 10, 0.85), body)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(min_value=0, max_value=2 * math.pi),
        st.floats(min_value=-6, max_value=6),
        st.floats(min_value=-6, max_value=6),
        st.floats(min_value=-3, max_value=3),
        st.floats(min_value=-3, max_value=3),
    )
    def test_rotation_about_axis(self, angle, sx, sy, dx, dy):
        if math.hypot(dx, dy) <= 0.25 or math.hypot(sx, sy) < 1e-6:
            return
        U = (20.0, 20.0)

        def rotated(x, y):
            c, s = math.cos(angle), math.sin(angle)
            return U[0] + c * x - s * y, U[1] + s * x + c * y

        body = body_at(*U)
        base = is_blocked(Vec3(U[0] + sx, U[1] + sy, 3.98), Vec3(U[0] + dx, U[1] + dy, 0.85), body)
        turned = is_blocked(
            Vec3(*rotated(sx, sy), 3.98), Vec3(*rotated(dx, dy), 0.85), body
        )
        # a grazing ray may flip on rounding
        margin = closest_approach_margin(
            np.array([[U[0] + sx, U[1] + sy, 3.98]]),
            np.array([[U[0] + dx, U[1] + dy, 0.85]]),
            np.array([[U[0], U[1], 1.6]]),
            0.2,
            1.6,
        )[0]
        if abs(margin) > 1e-6:
            assert base == turned

    def test_literal_rectangle_misses_grazing_ray(self):
        # heading along (1, -1) the first-quadrant rectangle lies in the ray's own
        # vertical plane; a ray passing just under the top edge slips past it
        U = Vec3(20.0, 20.0, 1.6)
        body = BodyCylinder(U, 0.2, 1.6)
        heading = Vec3(1.0, -1.0, 0.0) * (1.0 / math.sqrt(2.0))
        side = Vec3(1.0, 1.0, 0.0) * (1.0 / math.sqrt(2.0))
        closest = U + side * 0.19 + Vec3(0.0, 0.0, -0.01)
        rise, fall = 3.98 - closest.z, closest.z - 0.85
        S = closest - heading * (8.0 * rise) + Vec3(0.0, 0.0, rise)
        D = closest + heading * (8.0 * fall) - Vec3(0.0, 0.0, fall)
        assert is_blocked(S, D, body, ALIGNED)
        assert not is_blocked(S, D, body, LITERAL)


class TestVectorizedBlockage:
    def test_matches_scalar(self):
        rng = np.random.default_rng(3)
        S = np.column_stack([rng.uniform(0, 40, 400), rng.uniform(0, 40, 400), np.full(400, 3.98)])
        U = np.column_stack([rng.uniform(5, 35, 400), rng.uniform(5, 35, 400), np.full(400, 1.6)])
        ang = rng.uniform(-math.pi, math.pi, 400)
        D = U + np.column_stack([np.cos(ang), np.sin(ang), np.zeros(400)]) * 0.85
        D[:, 2] = 0.85
        for mode in (ALIGNED, LITERAL):
            batch = blocked_batch(S, D, U, 0.2, 1.6, mode)
            scalar = [
                is_blocked(Vec3.from_iter(s), Vec3.from_iter(d), body_at(u[0], u[1]), mode)
                for s, d, u in zip(S, D, U)
            ]
            assert batch.tolist() == scalar

    def test_mask_shape(self):
        leds = np.array([[10, 10, 3.98], [30, 30, 3.98]])
        devices = np.array([[12, 10, 0.85], [20, 20, 0.85], [25, 25, 0.85]])
        tops = np.array([[11, 10, 1.6], [40, 40, 1.6]])
        mask = occlusion_mask(leds, devices, tops, 0.2, 1.6)
        assert mask.shape == (3, 2, 2)
        assert not mask[:, :, 1].any()

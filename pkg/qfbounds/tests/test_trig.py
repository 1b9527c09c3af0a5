import math
import unittest

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qfbounds.exceptions import DomainViolation, InvariantViolation
from qfbounds.hyperboloid import (
    HPoint,
    Vec4,
    apply,
    boost,
    dist,
    distance_to_line,
    line_normal,
    origin,
)
from qfbounds.models import curve_length
from qfbounds.trig import (
    TriangleSides,
    angle_defect_area,
    angle_from_sides,
    angles,
    clamp,
    equidistant_length,
    equilateral_side,
    right_hypotenuse,
    right_leg,
    saccheri_top,
    side_from_sas,
    sinh_opposite,
)

sides = st.floats(min_value=0.01, max_value=8.0)


def planar(d, phi):
    return HPoint(Vec4(math.cosh(d), math.sinh(d) * math.cos(phi), math.sinh(d) * math.sin(phi), 0.0))


class ClampTests(unittest.TestCase):
    def test_inside_untouched(self):
        self.assertEqual(clamp(0.5, 0.0, 1.0), 0.5)

    def test_rounding_noise_clamped(self):
        self.assertEqual(clamp(1.0 + 1e-10, -1.0, 1.0), 1.0)

    def test_large_deviation_raises(self):
        with self.assertRaises(DomainViolation):
            clamp(1.01, -1.0, 1.0)

    def test_nan_raises(self):
        with self.assertRaises(DomainViolation):
            clamp(float("nan"), -1.0, 1.0)


class TriangleTests(unittest.TestCase):
    def test_degenerate_rejected(self):
        with self.assertRaises(InvariantViolation):
            TriangleSides(1.0, 2.0, 3.0)
        with self.assertRaises(InvariantViolation):
            TriangleSides(0.0, 1.0, 1.0)

    def test_equilateral_angles(self):
        angle = math.pi / 4
        s = equilateral_side(angle)
        for a in angles(TriangleSides(s, s, s)):
            self.assertAlmostEqual(a, angle, places=12)

    def test_equilateral_domain(self):
        with self.assertRaises(DomainViolation):
            equilateral_side(math.pi / 3)

    def test_named_and_indexed_vertices_agree(self):
        t = TriangleSides(1.0, 1.5, 2.0)
        self.assertEqual(angle_from_sides(t, "B"), angle_from_sides(t, 1))

    @given(sides, sides, st.floats(min_value=0.05, max_value=math.pi - 0.05))
    @settings(max_examples=200, deadline=None)
    def test_sas_inverts_angle(self, b, c, angle):
        a = side_from_sas(b, c, angle)
        assume(a > 1e-6 and a < b + c - 1e-9 and abs(b - c) < a - 1e-9)
        recovered = angle_from_sides(TriangleSides(a, b, c), "A")
        self.assertAlmostEqual(recovered, angle, delta=1e-6)

    def test_sas_matches_construction(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            b, c = rng.uniform(0.1, 4.0, size=2)
            angle = rng.uniform(0.1, math.pi - 0.1)
            measured = dist(planar(b, 0.0), planar(c, angle))
            self.assertAlmostEqual(side_from_sas(b, c, angle), measured, delta=1e-7 * max(1.0, measured))

    def test_angle_sum_and_area(self):
        t = TriangleSides(1.0, 1.2, 1.4)
        self.assertAlmostEqual(angle_defect_area(t), math.pi - sum(angles(t)), places=12)

    def test_small_triangle_is_nearly_euclidean(self):
        t = TriangleSides(3e-6, 4e-6, 5e-6)
        self.assertAlmostEqual(angle_from_sides(t, "C"), math.pi / 2, places=5)


class RightTriangleTests(unittest.TestCase):
    def test_right_triangles_against_construction(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            a, b = rng.uniform(0.01, 5.0, size=2)
            p, q = planar(a, 0.0), planar(b, 0.5 * math.pi)
            measured = dist(p, q)
            self.assertAlmostEqual(right_hypotenuse(a, b), measured, delta=1e-7 * max(1.0, measured))
            self.assertAlmostEqual(right_leg(measured, a), b, delta=1e-7 * max(1.0, b))

    def test_hypotenuse_with_zero_leg(self):
        self.assertEqual(right_hypotenuse(0.0, 2.0), 2.0)

    def test_log_space_continuity(self):
        below = right_hypotenuse(24.999, 25.0)
        above = right_hypotenuse(25.001, 25.0)
        self.assertLess(below, above)
        self.assertAlmostEqual(above - below, 0.002, places=6)

    def test_huge_legs_do_not_overflow(self):
        c = right_hypotenuse(400.0, 500.0)
        self.assertAlmostEqual(c, 900.0 - math.log(2.0), places=9)

    def test_sinh_opposite(self):
        self.assertAlmostEqual(sinh_opposite(0.5 * math.pi, 2.0), 2.0)
        self.assertAlmostEqual(sinh_opposite(0.3, 1.0), math.asinh(math.sin(0.3) * math.sinh(1.0)))
        self.assertAlmostEqual(sinh_opposite(0.3, 200.0), 200.0 + math.log(math.sin(0.3)), places=9)

    def test_sinh_opposite_tiny_angle(self):
        # sin(alpha) sinh(hyp) is small here even though hyp is not
        expected = math.asinh(1e-25 * math.sinh(51.0))
        self.assertAlmostEqual(expected, 7.05e-4, delta=1e-6)
        self.assertAlmostEqual(sinh_opposite(1e-25, 51.0), expected, delta=1e-15)
        self.assertAlmostEqual(sinh_opposite(1e-25, 60.0), math.asinh(1e-25 * math.sinh(60.0)), places=12)

    def test_sinh_opposite_beyond_overflow(self):
        self.assertAlmostEqual(sinh_opposite(0.3, 800.0), 800.0 + math.log(math.sin(0.3)), places=9)
        self.assertAlmostEqual(sinh_opposite(1e-300, 700.0), math.asinh(1e-300 * math.sinh(700.0)), places=9)
        self.assertAlmostEqual(sinh_opposite(1e-300, 800.0), 800.0 + math.log(1e-300), places=9)


class EquidistantTests(unittest.TestCase):
    def test_formula(self):
        self.assertEqual(equidistant_length(2.0, 0.0), 2.0)
        self.assertAlmostEqual(equidistant_length(1.0, 1.0), math.cosh(1.0))

    def test_negative_rejected(self):
        with self.assertRaises(DomainViolation):
            equidistant_length(-1.0, 1.0)

    def test_arcs_against_quadrature(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            l, h = rng.uniform(0.05, 2.0), rng.uniform(0.0, 2.0)

            def arc(t, l=l, h=h):
                s = t * l
                return np.column_stack(
                    [math.cosh(h) * np.cosh(s), math.cosh(h) * np.sinh(s), np.full_like(t, math.sinh(h)), 0 * t]
                )

            measured = curve_length(arc, rel_tol=1e-9, initial_samples=256)
            self.assertAlmostEqual(equidistant_length(l, h), measured, delta=1e-7 * max(1.0, measured))

    def test_saccheri_top_against_construction(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            base, h = rng.uniform(0.01, 2.0), rng.uniform(0.0, 3.0)
            r = planar(h, 0.5 * math.pi)
            q = apply(boost(1, base), r)
            self.assertAlmostEqual(saccheri_top(base, h), dist(r, q), delta=1e-8 * max(1.0, dist(r, q)))

    def test_legs_are_perpendicular_to_base(self):
        axis = line_normal(origin(), apply(boost(1, 1.0), origin()))
        r = planar(1.3, 0.5 * math.pi)
        self.assertAlmostEqual(distance_to_line(r, axis), 1.3, places=12)


if __name__ == "__main__":
    unittest.main()

import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from qfbounds.exceptions import DomainViolation
from qfbounds.hyperboloid import dist, origin, random_point
from qfbounds.models import (
    HomothetyParams,
    KleinPoint,
    curve_length,
    curve_length_lower_bound,
    from_klein,
    from_poincare,
    homothety_apply,
    klein_distance,
    perp_factor,
    radial_factor,
    to_klein,
    to_poincare,
)


def klein_chord(a, b):
    """Hyperboloid parametrization of the Euclidean Klein segment a -> b."""

    def path(t):
        k = (1.0 - t)[:, None] * a[None, :] + t[:, None] * b[None, :]
        x0 = 1.0 / np.sqrt(1.0 - np.sum(k * k, axis=1))
        return np.column_stack([x0, x0[:, None] * k])

    return path


class ConversionTests(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_klein_round_trip(self):
        for _ in range(100):
            p = random_point(self.rng, 3.0)
            self.assertAlmostEqual(dist(p, from_klein(to_klein(p))), 0.0, places=8)

    def test_poincare_round_trip(self):
        for _ in range(100):
            p = random_point(self.rng, 3.0)
            self.assertAlmostEqual(dist(p, from_poincare(to_poincare(p))), 0.0, places=8)

    def test_origin_maps_to_centre(self):
        self.assertEqual(to_klein(origin()).norm(), 0.0)
        self.assertTrue(np.allclose(to_poincare(origin()), 0.0))

    def test_klein_radius_distance(self):
        r = 0.6
        self.assertAlmostEqual(
            klein_distance(KleinPoint(0, 0, 0), KleinPoint(r, 0, 0)), math.atanh(r), places=12
        )

    def test_boundary_rejected(self):
        with self.assertRaises(DomainViolation):
            KleinPoint(1.0, 0.0, 0.0)
        with self.assertRaises(DomainViolation):
            from_poincare([0.0, 1.0, 0.0])


class HomothetyTests(unittest.TestCase):
    def test_params_accept_lambda_alias(self):
        params = HomothetyParams(**{"lambda": 0.5, "rho_B": 0.9})
        self.assertEqual(params.lam, 0.5)

    def test_params_ranges(self):
        with self.assertRaises(ValidationError):
            HomothetyParams(lam=1.5, rho_B=0.5)
        with self.assertRaises(ValidationError):
            HomothetyParams(lam=0.5, rho_B=1.0)

    def test_identity_homothety(self):
        p = from_klein(KleinPoint(0.3, 0.1, 0.0))
        self.assertIs(homothety_apply(HomothetyParams(lam=1.0, rho_B=0.5), p), p)

    def test_point_outside_ball_rejected(self):
        with self.assertRaises(DomainViolation):
            homothety_apply(HomothetyParams(lam=0.5, rho_B=0.2), from_klein(KleinPoint(0.5, 0, 0)))

    def test_factors_at_centre(self):
        self.assertEqual(radial_factor(0.5, 0.0), 0.5)
        self.assertEqual(perp_factor(0.5, 0.0), 0.5)

    def test_factors_equal_one_without_scaling(self):
        self.assertAlmostEqual(radial_factor(1.0, 0.7), 1.0, places=15)
        self.assertAlmostEqual(perp_factor(1.0, 0.7), 1.0, places=15)

    def test_factor_grid(self):
        grid = np.linspace(0.01, 0.99, 10)
        violations = 0
        for lam in np.linspace(0.05, 1.0, 10):
            f = [radial_factor(lam, rho) for rho in grid]
            g = [perp_factor(lam, rho) for rho in grid]
            violations += sum(1 for a, b in zip(f, f[1:]) if b > a + 1e-15)
            violations += sum(1 for a, b in zip(g, g[1:]) if b > a + 1e-15)
            violations += sum(1 for a, b in zip(f, g) if a > b + 1e-15)
        self.assertEqual(violations, 0)

    def test_image_length_bound(self):
        rng = np.random.default_rng(11)
        rho = 0.9
        for _ in range(200):
            lam = rng.uniform(0.5, 1.0)
            params = HomothetyParams(lam=lam, rho_B=rho)
            a, b = (rng.normal(size=3) for _ in range(2))
            a *= rng.uniform(0, rho) / np.linalg.norm(a)
            b *= rng.uniform(0, rho) / np.linalg.norm(b)
            length = curve_length(klein_chord(a, b), rel_tol=1e-10)
            image = curve_length(klein_chord(lam * a, lam * b), rel_tol=1e-10)
            self.assertGreaterEqual(image, curve_length_lower_bound(params, length) - 1e-6)

    @given(st.floats(min_value=0.1, max_value=1.0), st.floats(min_value=0.0, max_value=0.95))
    @settings(max_examples=100, deadline=None)
    def test_radial_factor_not_above_ratio(self, lam, rho):
        self.assertLessEqual(radial_factor(lam, rho), lam + 1e-15)


class CurveLengthTests(unittest.TestCase):
    def test_geodesic_segment(self):
        a, b = np.array([-0.5, 0.0, 0.0]), np.array([0.5, 0.0, 0.0])
        expected = klein_distance(KleinPoint(*a), KleinPoint(*b))
        self.assertAlmostEqual(curve_length(klein_chord(a, b)), expected, places=9)

    def test_circle_length(self):
        r = 1.0

        def circle(t):
            phi = 2 * math.pi * t
            return np.column_stack(
                [np.full_like(t, math.cosh(r)), math.sinh(r) * np.cos(phi), math.sinh(r) * np.sin(phi), 0 * t]
            )

        self.assertAlmostEqual(curve_length(circle), 2 * math.pi * math.sinh(r), places=6)


if __name__ == "__main__":
    unittest.main()

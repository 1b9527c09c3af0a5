import math
import unittest

import numpy as np

from qfbounds.exceptions import DomainViolation, SurfaceError
from qfbounds.fixtures import bipyramid, doubled_triangle, embedded_octahedron, octahedron
from qfbounds.oracles import H2GridOracle, PairTableOracle
from qfbounds.surface import (
    Combinatorics,
    Triangulation,
    comparison_polyhedron,
    cone_angle,
    curvature_class,
    diameter_estimate,
    edge_key,
    embedded_chordal_distance,
    euler_characteristic,
    gauss_bonnet_residual,
    intrinsic_distance,
    metric_deviation,
    scale_curvature,
    scale_distances,
    validate,
)
from qfbounds.trig import equilateral_side, right_leg

OCTAHEDRON_SIDE = equilateral_side(math.pi / 4)
# opposite vertices: twice the altitude of one face
OCTAHEDRON_DIAMETER = 2.0 * right_leg(OCTAHEDRON_SIDE, 0.5 * OCTAHEDRON_SIDE)


class ValidationTests(unittest.TestCase):
    def test_fixtures_are_clean(self):
        for s in (octahedron(), bipyramid(6), bipyramid(10), doubled_triangle(1.0, 1.2, 1.4)):
            self.assertTrue(validate(s).clean, validate(s).kinds())

    def test_missing_length(self):
        s = doubled_triangle(1.0, 1.0, 1.0)
        lengths = dict(s.tri.edge_lengths)
        del lengths[(0, 1)]
        report = validate(Triangulation(3, s.triangles, lengths))
        self.assertIn("missing_length", report.kinds())

    def test_length_conflict(self):
        tri = Triangulation.from_entries(
            3,
            [(0, 1, 2), (0, 2, 1)],
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (1, 0, 1.5)],
        )
        self.assertIn("length_conflict", validate(tri).kinds())

    def test_triangle_inequality(self):
        report = validate(doubled_triangle(1.0, 1.0, 3.0).tri)
        self.assertIn("triangle_inequality", report.kinds())

    def test_open_surface(self):
        report = validate(Triangulation(3, ((0, 1, 2),), {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0}))
        self.assertIn("edge_incidence", report.kinds())

    def test_inconsistent_orientation(self):
        tri = Triangulation(3, ((0, 1, 2), (0, 1, 2)), {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0})
        self.assertIn("orientation", validate(tri).kinds())

    def test_vertex_out_of_range(self):
        tri = Triangulation(3, ((0, 1, 5), (0, 5, 1)), {})
        self.assertEqual(validate(tri).kinds(), ["index"])

    def test_pinched_vertex(self):
        # two octahedra sharing vertex 0 only
        first = octahedron()
        triangles = list(first.triangles)
        lengths = dict(first.tri.edge_lengths)
        shift = {0: 0}
        shift.update({v: v + 5 for v in range(1, 6)})
        for t in first.triangles:
            triangles.append(tuple(shift[v] for v in t))
        for (u, v), x in first.tri.edge_lengths.items():
            lengths[edge_key(shift[u], shift[v])] = x
        report = validate(Triangulation(11, tuple(triangles), lengths))
        self.assertIn("vertex_link", report.kinds())

    def test_require_valid(self):
        s = doubled_triangle(1.0, 1.0, 3.0)
        with self.assertRaises(SurfaceError):
            intrinsic_distance(s, 0, 1, 1)


class ConeAngleTests(unittest.TestCase):
    def test_octahedron_cone_angles(self):
        for v in range(6):
            self.assertAlmostEqual(cone_angle(octahedron(), v), math.pi, places=12)

    def test_eight_triangles_make_a_flat_vertex(self):
        self.assertAlmostEqual(cone_angle(bipyramid(8), 0), 2 * math.pi, places=9)

    def test_curvature_classes(self):
        self.assertTrue(curvature_class(bipyramid(6)).accepted)
        rejected = curvature_class(bipyramid(10))
        self.assertFalse(rejected.accepted)
        self.assertEqual(rejected.offending, (0, 1))
        self.assertAlmostEqual(rejected.max_cone_angle, 2.5 * math.pi, places=9)

    def test_invalid_vertex(self):
        with self.assertRaises(SurfaceError):
            cone_angle(octahedron(), 6)

    def test_gauss_bonnet(self):
        for s in (octahedron(), bipyramid(6), bipyramid(10), doubled_triangle(0.5, 0.7, 0.9)):
            self.assertEqual(euler_characteristic(s), 2)
            self.assertLess(abs(gauss_bonnet_residual(s)), 1e-6)


class DistanceTests(unittest.TestCase):
    def test_edge_and_opposite_vertices(self):
        s = octahedron()
        self.assertAlmostEqual(intrinsic_distance(s, 0, 2, 4), OCTAHEDRON_SIDE, places=9)
        self.assertAlmostEqual(intrinsic_distance(s, 0, 1, 4), OCTAHEDRON_DIAMETER, places=9)
        self.assertAlmostEqual(intrinsic_distance(s, 2, 4, 4), OCTAHEDRON_DIAMETER, places=9)

    def test_zero_and_symmetry(self):
        s = octahedron()
        self.assertEqual(intrinsic_distance(s, 3, 3, 2), 0.0)
        self.assertAlmostEqual(intrinsic_distance(s, 2, 5, 2), intrinsic_distance(s, 5, 2, 2), places=12)

    def test_non_increasing_in_refinement(self):
        s = doubled_triangle(0.8, 1.7, 1.2)
        values = [intrinsic_distance(s, 0, 1, n) for n in range(6)]
        for a, b in zip(values, values[1:]):
            self.assertLessEqual(b, a)

    def test_convergence(self):
        s = octahedron()
        for u, v in ((0, 1), (2, 3), (2, 4)):
            self.assertLess(abs(intrinsic_distance(s, u, v, 16) - intrinsic_distance(s, u, v, 32)), 1e-3)

    def test_negative_refinement(self):
        with self.assertRaises(DomainViolation):
            intrinsic_distance(octahedron(), 0, 1, -1)

    def test_diameter(self):
        self.assertAlmostEqual(diameter_estimate(octahedron(), 2), OCTAHEDRON_DIAMETER, places=9)

    def test_intrinsic_at_least_chordal(self):
        s, points = embedded_octahedron()
        for u in range(6):
            for v in range(6):
                self.assertGreaterEqual(
                    intrinsic_distance(s, u, v, 4) + 1e-9, embedded_chordal_distance(points, u, v)
                )

    def test_embedding_matches_edge_lengths(self):
        s, points = embedded_octahedron()
        for u, v in s.tri.edges():
            self.assertAlmostEqual(embedded_chordal_distance(points, u, v), s.edge_length(u, v), places=9)


class MetricDeviationTests(unittest.TestCase):
    PAIRS = [(u, v) for u in range(6) for v in range(u + 1, 6)]

    @staticmethod
    def table_distance(table):
        return lambda u, v: float(table[u, v])

    def random_distances(self, rng):
        table = rng.uniform(0.0, 5.0, size=(6, 6))
        return self.table_distance(table + table.T)

    def test_uniform_stretch(self):
        s = octahedron()
        table = np.zeros((6, 6))
        for u, v in self.PAIRS:
            table[u, v] = table[v, u] = intrinsic_distance(s, u, v, 4)
        stretched = self.table_distance(1.1 * table)
        deviation = metric_deviation(self.table_distance(table), stretched, self.PAIRS)
        self.assertAlmostEqual(deviation, 0.1 * OCTAHEDRON_DIAMETER, places=9)

    def test_pseudometric(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a, b, c = (self.random_distances(rng) for _ in range(3))
            self.assertEqual(metric_deviation(a, a, self.PAIRS), 0.0)
            self.assertEqual(metric_deviation(a, b, self.PAIRS), metric_deviation(b, a, self.PAIRS))
            self.assertLessEqual(
                metric_deviation(a, c, self.PAIRS),
                metric_deviation(a, b, self.PAIRS) + metric_deviation(b, c, self.PAIRS) + 1e-12,
            )


class ScalingTests(unittest.TestCase):
    def test_scale_curvature(self):
        self.assertEqual(scale_curvature(-1.0, 4.0), -0.25)
        with self.assertRaises(DomainViolation):
            scale_curvature(-1.0, 0.0)

    def test_scaling_doubles_distances(self):
        s = octahedron()
        scaled = scale_distances(s, 4.0)
        self.assertEqual(scaled.face_curvature, -0.25)
        for u, v in ((0, 1), (0, 2), (2, 4)):
            self.assertAlmostEqual(
                intrinsic_distance(scaled, u, v, 4), 2.0 * intrinsic_distance(s, u, v, 4), delta=1e-6
            )

    def test_scaling_keeps_cone_angles(self):
        s = bipyramid(6)
        for a, b in zip(s.cone_angles(), scale_distances(s, 9.0).cone_angles()):
            self.assertAlmostEqual(a, b, places=12)

    def test_shrinking_rejected(self):
        with self.assertRaises(DomainViolation):
            scale_distances(octahedron(), 0.5)


class ComparisonPolyhedronTests(unittest.TestCase):
    def test_own_oracle_reproduces_edges(self):
        s = octahedron()
        oracle = PairTableOracle([(u, v, x) for (u, v), x in s.tri.edge_lengths.items()])
        rebuilt = comparison_polyhedron(oracle, s.tri.combinatorics())
        for e, x in s.tri.edge_lengths.items():
            self.assertLess(abs(rebuilt.tri.edge_lengths[e] - x), 1e-12)

    def test_unbuildable_triangle(self):
        oracle = PairTableOracle([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.5)])
        with self.assertRaises(SurfaceError):
            comparison_polyhedron(oracle, Combinatorics(3, ((0, 1, 2), (0, 2, 1))))

    def test_grid_refinement_improves(self):
        deviations, excesses = [], []
        for cells in (2, 4, 8):
            oracle = H2GridOracle(cells=cells)
            s = comparison_polyhedron(oracle, oracle.combinatorics())
            self.assertTrue(curvature_class(s).accepted)
            pairs = oracle.declared_pairs()
            deviations.append(
                metric_deviation(oracle.distance, lambda u, v: intrinsic_distance(s, u, v, 3), pairs)
            )
            angles = s.cone_angles()
            excesses.append(max(abs(angles[v] - 2 * math.pi) for v in oracle.interior_vertices()))
        self.assertLess(deviations[1], deviations[0])
        self.assertLess(deviations[2], deviations[1])
        self.assertLess(excesses[1], excesses[0])
        self.assertLess(excesses[2], excesses[1])


if __name__ == "__main__":
    unittest.main()

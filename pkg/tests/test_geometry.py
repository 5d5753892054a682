import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from walklab.core.errors import ConfigError, InvalidPointError
from walklab.models import words
from walklab.models.quasiconvex import axis, geodesic, vertex_set
from walklab.models.reports import PASS, VACUOUS
from walklab.models.space import FreeGroupTree, HalfPlane
from walklab.providers import geometry


def reduced_words(rank=2, max_size=10):
    letters = words.alphabet(rank)
    return st.lists(st.sampled_from(letters), max_size=max_size).map(lambda ls: words.reduce_word("".join(ls)))


class TestMetric(unittest.TestCase):
    def setUp(self):
        self.tree = FreeGroupTree(2)
        self.plane = HalfPlane()

    def test_tree_distance_examples(self):
        self.assertEqual(geometry.distance(self.tree, "ab", "ab"), 0)
        self.assertEqual(geometry.distance(self.tree, "", "abA"), 3)

    def test_halfplane_axis_distance(self):
        self.assertAlmostEqual(geometry.distance(self.plane, (0, 1), (0, math.e)), 1.0, places=12)

    def test_invalid_points_rejected(self):
        with self.assertRaises(InvalidPointError):
            geometry.distance(self.tree, "aA", "")
        with self.assertRaises(InvalidPointError):
            geometry.distance(self.plane, (0, 1), (0, -1))

    def test_gromov_product_examples(self):
        self.assertEqual(geometry.gromov_product(self.tree, "", "aab", "aBB"), 1)
        self.assertEqual(geometry.gromov_product(self.tree, "", "ab", "ab"), 2)
        gp = geometry.gromov_product(self.plane, (0, 1), (0, math.e ** 2), (0, math.exp(-1)))
        self.assertAlmostEqual(gp, 0.0, places=9)

    @given(reduced_words(), reduced_words(), reduced_words())
    def test_gromov_product_properties(self, base, y, z):
        gp = geometry.gromov_product(self.tree, base, y, z)
        self.assertEqual(gp, geometry.gromov_product(self.tree, base, z, y))
        self.assertGreaterEqual(gp, 0)
        self.assertLessEqual(gp, min(self.tree.distance(base, y), self.tree.distance(base, z)))
        self.assertEqual(geometry.gromov_product(self.tree, base, y, y), self.tree.distance(base, y))
        # the common-prefix value agrees with the metric formula
        self.assertEqual(gp, geometry._gp(self.tree, base, y, z))

    @given(reduced_words(), reduced_words(), reduced_words(), reduced_words())
    def test_tree_four_point_exact(self, w, x, y, z):
        self.assertTrue(geometry.verify_four_point(self.tree, (w, x, y, z), 0.0))

    def test_degenerate_quadruple(self):
        self.assertTrue(geometry.verify_four_point(self.plane, ((0, 1), (1, 2), (1, 2), (1, 2)), 0.0))

    def test_halfplane_four_point_sampled(self):
        report = geometry.four_point_report(self.plane, samples=500, seed=3, delta=1.0)
        self.assertEqual(report.status, PASS)
        self.assertLessEqual(report.details["max_defect"], 1.0)


class TestProjection(unittest.TestCase):
    def setUp(self):
        self.tree = FreeGroupTree(2)
        self.plane = HalfPlane()
        self.D = axis("a")

    def test_strip_prefix(self):
        proj = geometry.closest_point(self.tree, self.D, "aab")
        self.assertEqual(proj.point, "aa")
        self.assertEqual(proj.distance, 1)

    def test_member_projects_to_itself(self):
        self.assertEqual(geometry.project(self.tree, self.D, "AAA"), "AAA")
        self.assertEqual(geometry.distance_to(self.tree, self.D, "AAA"), 0)

    def test_projection_matches_exhaustive_ball(self):
        D = vertex_set(["ab", "Ba", "bbb"])
        for y in words.ball(2, 4):
            best = min(self.tree.distance(p, y) for p in D.representation.points)
            self.assertEqual(geometry.distance_to(self.tree, D, y), best)

    def test_word_subgroup_by_enumeration(self):
        D = axis("ab")
        proj = geometry.closest_point(self.tree, D, "ababb")
        self.assertEqual(proj.distance, 1)
        self.assertEqual(proj.point, "abab")

    def test_halfplane_projection_to_imaginary_axis(self):
        proj = geometry.closest_point(self.plane, geodesic(0, math.inf), (1, 1))
        self.assertAlmostEqual(proj.distance, math.asinh(1), places=12)
        self.assertAlmostEqual(proj.point.real, 0.0, places=12)
        self.assertAlmostEqual(proj.point.imag, math.sqrt(2), places=12)

    def test_geodesic_lines_need_halfplane(self):
        with self.assertRaises(InvalidPointError):
            geometry.closest_point(self.tree, geodesic(0, math.inf), "a")

    def test_axis_line_of_generators(self):
        line_a = geometry.axis_line(self.plane, "a")
        self.assertEqual((line_a.representation.start, line_a.representation.end), (0.0, math.inf))
        line_b = geometry.axis_line(self.plane, "b")
        ends = sorted((line_b.representation.start, line_b.representation.end))
        self.assertAlmostEqual(ends[0], -1.0, places=9)
        self.assertAlmostEqual(ends[1], 1.0, places=9)

    def test_set_distance_translated_axis(self):
        E = self.D.translate(self.tree, words.parse_word("b^10"))
        self.assertEqual(geometry.set_distance(self.tree, self.D, E), 10)

    def test_set_distance_disjoint_lines(self):
        # |z| = 1 and |z| = e^2 are at distance 2 along the imaginary axis
        inner = geodesic(-1, 1)
        outer = geodesic(-math.e ** 2, math.e ** 2)
        self.assertAlmostEqual(geometry.set_distance(self.plane, inner, outer), 2.0, places=9)


class TestApproximateTree(unittest.TestCase):
    def setUp(self):
        self.tree = FreeGroupTree(2)
        self.plane = HalfPlane()

    def test_tree_points_are_exact(self):
        t = geometry.approximate_tree(self.tree, ["ab", "aBa", "bb", "AAb"])
        self.assertEqual(t.distortion, 0)
        self.assertTrue(t.satisfies_sandwich(self.tree))
        for i in range(4):
            for j in range(4):
                self.assertEqual(t.tree_distance(i, j), self.tree.distance(t.points[i], t.points[j]))

    def test_tripod_center(self):
        t = geometry.approximate_tree(self.tree, ["aa", "bb", "ABB"])
        center = geometry.tree_center(t, 0, 1, 2)
        self.assertEqual(t.node_distance(center, t.leaf(0)), 2)
        self.assertEqual(geometry.tree_gromov_product(t, 0, 1, 2), 2)

    def test_collinear_center_is_middle_leaf(self):
        t = geometry.approximate_tree(self.tree, ["", "aa", "aaaa"])
        self.assertEqual(geometry.tree_center(t, 0, 1, 2), t.leaf(1))

    def test_halfplane_sandwich(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            points = geometry.sample_box(rng, 4)
            t = geometry.approximate_tree(self.plane, points)
            self.assertTrue(t.satisfies_sandwich(self.plane))

    def test_point_count_checked(self):
        with self.assertRaises(ConfigError):
            geometry.approximate_tree(self.tree, ["a", "b"])
        with self.assertRaises(ConfigError):
            geometry.approximate_tree(self.tree, ["a", "a", "b"])


class TestQuasiconvexCheckers(unittest.TestCase):
    def setUp(self):
        self.tree = FreeGroupTree(2)
        self.D = axis("a")

    def test_one_set_exact_tree(self):
        y, z = words.parse_word("b^5"), words.parse_word("b^5a^5")
        report = geometry.check_one_quasiconvex(self.tree, self.D, y, z, (1, 0, 0))
        self.assertEqual(report.status, PASS)
        self.assertEqual(geometry.distance_to(self.tree, self.D, z), 10)

    def test_one_set_hypothesis_unmet(self):
        report = geometry.check_one_quasiconvex(self.tree, self.D, "bbbbb", "BBBBB", (1, 0, 0))
        self.assertEqual(report.status, VACUOUS)
        self.assertEqual(report.details["hypothesis_unmet"], 1)

    def test_two_sets_exact_tree(self):
        E = self.D.translate(self.tree, words.parse_word("b^10"))
        report = geometry.check_two_quasiconvex(self.tree, self.D, E, "bbbbb", (1, 0, 0))
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.details["min_d_DE"], 10)

    def test_two_sets_equal_is_vacuous(self):
        report = geometry.check_two_quasiconvex(self.tree, self.D, self.D, "aaa", (1, 0, 0))
        self.assertEqual(report.status, VACUOUS)

    def test_exhaustive_ball(self):
        one = geometry.verify_ball(self.tree, self.D, 4, (1, 0, 0), z_radius=3)
        self.assertEqual(one.violation_count, 0)
        self.assertGreater(one.details["hypothesis_met"], 0)
        E = self.D.translate(self.tree, words.parse_word("b^6"))
        two = geometry.verify_ball(self.tree, self.D, 4, (1, 0, 0), E=E)
        self.assertEqual(two.violation_count, 0)

    def test_center_projection_tree(self):
        report = geometry.check_center_projection(self.tree, self.D, "aabb", 0.0)
        self.assertTrue(report.passed)
        self.assertEqual(report.details["max_center_offset"], 0)

    def test_constants_validated(self):
        with self.assertRaises(ConfigError):
            geometry.check_one_quasiconvex(self.tree, self.D, "b", "bb", (1, 0))

    def test_quasiconvexity_of_letter_axis(self):
        report = geometry.verify_quasiconvexity(self.tree, self.D, samples=50, seed=1)
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.details["max_observed"], 0)

    def test_halfplane_two_lines_sampled(self):
        plane = HalfPlane()
        D = geodesic(0, math.inf)
        E = D.translate(plane, "b")
        report = geometry.verify_samples(plane, D, (4, 8, 4), samples=150, seed=5, E=E)
        self.assertTrue(report.passed)

    @settings(max_examples=60, deadline=None)
    @given(reduced_words(max_size=8), reduced_words(max_size=8))
    def test_one_set_random_tree_configurations(self, y, z):
        report = geometry.check_one_quasiconvex(self.tree, self.D, y, z, (1, 0, 0))
        self.assertTrue(report.passed)


if __name__ == "__main__":
    unittest.main()

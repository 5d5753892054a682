import math
import unittest

from walklab.core.errors import ConfigError
from walklab.models import words
from walklab.models.reports import INCONCLUSIVE, PASS, VACUOUS
from walklab.models.shadow import ShadowSpec
from walklab.models.space import FreeGroupTree, HalfPlane
from walklab.providers import shadow


class TestMembership(unittest.TestCase):
    def setUp(self):
        self.tree = FreeGroupTree(2)

    def test_tree_examples(self):
        s = ShadowSpec("", "aaaa", 0)
        self.assertTrue(shadow.in_shadow(self.tree, s, "aaaab"))
        self.assertFalse(shadow.in_shadow(self.tree, s, "aab"))

    def test_agrees_with_prefix_oracle(self):
        for radius in (0, 1, 2):
            s = ShadowSpec("", "aab", radius)
            for z in words.ball(2, 5):
                self.assertEqual(shadow.in_shadow(self.tree, s, z), shadow.tree_shadow_oracle(s, z), (radius, z))

    def test_target_lies_in_its_shadow(self):
        plane = HalfPlane()
        s = ShadowSpec(1j, complex(0, math.exp(4)), 0.5)
        self.assertTrue(shadow.in_shadow(plane, s, s.target))

    def test_radius_monotone(self):
        s = ShadowSpec("", "abab", 0)
        report = shadow.verify_radius_monotone(self.tree, s, [0, 1, 2, 3], list(words.ball(2, 4)))
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.checked, 161)


class TestShadowCalculus(unittest.TestCase):
    def setUp(self):
        self.tree = FreeGroupTree(2)

    def test_merge_in_tree(self):
        report = shadow.verify_shadow_merge(self.tree, ShadowSpec("", "aaaa", 1), ShadowSpec("", "aa", 1))
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.details["merged_radius"], 1)
        self.assertGreater(report.checked, 0)

    def test_merged_radius_is_not_the_smaller_radius(self):
        s1, s2 = ShadowSpec("", "a", 0), ShadowSpec("", "ab", 1)
        self.assertTrue(shadow.in_shadow(self.tree, s1, "ab") and shadow.in_shadow(self.tree, s2, "ab"))
        self.assertTrue(shadow.in_shadow(self.tree, s1, "aa"))
        self.assertFalse(shadow.in_shadow(self.tree, ShadowSpec("", "ab", 0), "aa"))
        widened = shadow.merged_radius(self.tree, s1, s2)
        self.assertEqual(widened, 1)
        self.assertTrue(shadow.in_shadow(self.tree, ShadowSpec("", "ab", widened), "aa"))
        self.assertEqual(shadow.verify_shadow_merge(self.tree, s1, s2).status, PASS)

    def test_merge_needs_shared_base(self):
        with self.assertRaises(ConfigError):
            shadow.verify_shadow_merge(self.tree, ShadowSpec("", "aa", 1), ShadowSpec("b", "aa", 1))

    def test_disjoint_shadows_are_inconclusive(self):
        report = shadow.verify_shadow_merge(self.tree, ShadowSpec("", "aaa", 0), ShadowSpec("", "bbb", 0),
                                            radius=3)
        self.assertEqual(report.status, INCONCLUSIVE)

    def test_nested_gap(self):
        report = shadow.verify_nested_gap(self.tree, ShadowSpec("", "aaaaa", 1), A=2, K=0)
        self.assertEqual(report.status, PASS)
        self.assertGreaterEqual(report.details["min_gap"], 2)

    def test_nested_gap_without_width_is_vacuous(self):
        report = shadow.verify_nested_gap(self.tree, ShadowSpec("", "aaaaa", 1), A=0, K=0)
        self.assertEqual(report.status, VACUOUS)

    def test_complement_sandwich(self):
        report = shadow.verify_complement_sandwich(self.tree, "", "aaaaaa", R=2, K=1)
        self.assertEqual(report.status, PASS)
        self.assertGreater(report.details["agreements"], 0)

    def test_complement_sandwich_parameters(self):
        with self.assertRaises(ConfigError):
            shadow.verify_complement_sandwich(self.tree, "", "aaaaaa", R=1, K=1)
        with self.assertRaises(ConfigError):
            shadow.verify_complement_sandwich(self.tree, "", "aa", R=2, K=1)

    def test_rebase(self):
        report = shadow.verify_rebase(self.tree, "aaaa", "b", "", 2, (1, 0))
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.details["s"], 3)
        self.assertGreater(report.checked, 0)

    def test_rebase_hypothesis_unmet(self):
        report = shadow.verify_rebase(self.tree, "aaaa", "b", "", 0, (1, 0))
        self.assertEqual(report.status, VACUOUS)


if __name__ == "__main__":
    unittest.main()

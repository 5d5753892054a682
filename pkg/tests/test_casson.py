import unittest

import numpy as np
from hypothesis import given, strategies as st

from walklab.core.errors import ConfigError
from walklab.models.casson import S3, TREFOIL
from walklab.models.measure import StepDistribution, ZStepLaw
from walklab.providers import casson

word_text = st.lists(st.sampled_from("aAbB"), max_size=12).map("".join)


class TestInvariantBookkeeping(unittest.TestCase):
    def test_trefoil_surgery(self):
        for m in range(-4, 5):
            value = casson.casson_surgery(TREFOIL, m)
            self.assertEqual(value.lam, m)
            self.assertTrue(value.is_consistent())

    def test_surgery_needs_integer(self):
        with self.assertRaises(ConfigError):
            casson.casson_surgery(TREFOIL, 2.5)

    def test_poincare_sphere(self):
        self.assertEqual(casson.poincare_sphere().lam, 1)
        self.assertEqual(casson.reverse_orientation(casson.reverse_orientation(casson.poincare_sphere())).lam, 1)

    def test_realize_every_value(self):
        for k in (-3, 0, 1, 7):
            value = casson.realize_casson_value(k)
            self.assertEqual(value.lam, k)
            self.assertEqual(value.replay(), k)
        self.assertEqual(casson.realize_casson_value(0), S3)

    @given(st.integers(-20, 20), st.integers(-20, 20))
    def test_connected_sum_adds(self, a, b):
        total = casson.connected_sum(casson.realize_casson_value(a), casson.realize_casson_value(b))
        self.assertEqual(total.lam, a + b)
        self.assertTrue(total.is_consistent())

    def test_consecutive_surgeries_differ_by_one(self):
        self.assertEqual(set(casson.surgery_differences(TREFOIL, 5)), {1})


class TestHomomorphism(unittest.TestCase):
    def test_evaluation(self):
        self.assertEqual(casson.homomorphism_eval({"a": 1}, "aaaA"), 2)
        self.assertEqual(casson.homomorphism_eval({"a": 1, "b": 5}, "b^2a^-3"), 7)

    @given(word_text, word_text)
    def test_additive(self, u, v):
        values = {"a": 2, "b": -3}
        self.assertEqual(casson.homomorphism_eval(values, u + v),
                         casson.homomorphism_eval(values, u) + casson.homomorphism_eval(values, v))

    def test_missing_generator(self):
        with self.assertRaises(ConfigError):
            casson.homomorphism_eval({"a": 1}, "ab")
        with self.assertRaises(ConfigError):
            casson.homomorphism_eval({"a": 0.5}, "a")

    def test_pushforward_of_simple_walk(self):
        law = casson.pushforward(StepDistribution.simple_random_walk(), {"a": 0, "b": 1})
        self.assertEqual(law, ZStepLaw.lazy())
        report = casson.pushforward_report(law)
        self.assertTrue(report["symmetric"])
        self.assertTrue(report["irreducible"])
        self.assertEqual(report["mean"], 0.0)


class TestIntegerWalk(unittest.TestCase):
    def test_lazy_return_probability(self):
        hit = casson.z_walk_hit_prob(ZStepLaw.lazy(), 400, 0)
        self.assertAlmostEqual(hit.probability, 0.0282, delta=0.0002)
        self.assertAlmostEqual(hit.c, hit.probability * 20)

    def test_zero_steps(self):
        self.assertEqual(casson.z_walk_hit_prob(ZStepLaw.lazy(), 0, 0).probability, 1.0)
        self.assertEqual(casson.z_walk_hit_prob(ZStepLaw.lazy(), 0, 1).probability, 0.0)

    def test_distribution_is_symmetric_law(self):
        low, weights = casson.z_walk_distribution(ZStepLaw.lazy(), 50)
        self.assertEqual(low, -50)
        self.assertAlmostEqual(float(weights.sum()), 1.0, places=12)
        np.testing.assert_allclose(weights, weights[::-1], atol=1e-12)

    def test_parity_walk(self):
        with self.assertRaises(ConfigError):
            casson.z_walk_hit_prob(ZStepLaw.simple(), 11, 0)
        self.assertEqual(casson.z_walk_hit_prob(ZStepLaw.simple(), 11, 0, strict=False).probability, 0.0)

    def test_sustained_constant(self):
        c0 = casson.sustained_constant(ZStepLaw.lazy(), 0, [100, 200, 400])
        self.assertGreater(c0, 0.55)
        self.assertLess(c0, 0.57)
        with self.assertRaises(ConfigError):
            casson.sustained_constant(ZStepLaw.lazy(), 0, [0])

    def test_local_shape(self):
        shape = casson.check_local_shape(ZStepLaw.lazy(), 400)
        self.assertTrue(shape["ok"])


class TestCrossover(unittest.TestCase):
    def test_reference_value(self):
        self.assertEqual(casson.existence_crossover(1, 0.9, 0.1), 40)
        self.assertEqual(casson.existence_crossover(1, 0.9, 0.1, sustained=True), 40)
        self.assertTrue(casson.verify_crossover(1, 0.9, 0.1, 40))
        self.assertFalse(casson.verify_crossover(1, 0.9, 0.1, 39))

    def test_invalid_parameters(self):
        for args in ((0, 0.9, 0.1), (1, 1.0, 0.1), (1, 0.9, 0)):
            with self.assertRaises(ConfigError):
                casson.existence_crossover(*args)

    @given(st.floats(0.5, 5), st.floats(0.5, 0.95), st.floats(0.01, 1))
    def test_least_crossing(self, K, c, c0):
        n = casson.existence_crossover(K, c, c0)
        self.assertGreater(casson._margin(K, c, c0, n), 0)
        for m in range(1, n):
            self.assertLessEqual(casson._margin(K, c, c0, m), 0)

    def test_genus_thresholds(self):
        self.assertEqual(casson.genus_threshold_check(5, 2), {"hyperbolic": True, "genus_exactly_g": True})
        self.assertEqual(casson.genus_threshold_check(3, 2), {"hyperbolic": True, "genus_exactly_g": False})
        self.assertEqual(casson.genus_threshold_check(2, 2), {"hyperbolic": False, "genus_exactly_g": False})
        with self.assertRaises(ConfigError):
            casson.genus_threshold_check(5, 1)


if __name__ == "__main__":
    unittest.main()

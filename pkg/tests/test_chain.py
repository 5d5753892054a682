import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from walklab.core.caching import clear_cache
from walklab.core.errors import CertificateError, ConfigError
from walklab.models.chain import ChainParams
from walklab.models.kernels import KernelTable
from walklab.models.reports import CONDITIONAL, FAIL, PASS
from walklab.providers import chain


def cdf_arrays(min_size=1, max_size=8):
    weights = st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=min_size, max_size=max_size)
    return weights.filter(lambda w: sum(w) > 1e-3).map(lambda w: np.cumsum(np.array(w) / sum(w)))


class TestTransitions(unittest.TestCase):
    def setUp(self):
        self.params = ChainParams(eps=0.5, q=0.2)

    def test_transition_values(self):
        self.assertAlmostEqual(chain.transition(self.params, 2, 0), 0.2 ** 3, places=15)
        self.assertAlmostEqual(chain.transition(self.params, 0, 1), 0.5, places=15)
        self.assertAlmostEqual(chain.transition(self.params, 1, 2), 0.76, places=15)
        self.assertEqual(chain.transition(self.params, 1, 3), 0.0)

    def test_rows_sum_to_one(self):
        report = chain.check_row_sums(self.params.with_truncation(200))
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.checked, 201)

    def test_parameter_validation(self):
        with self.assertRaises(ConfigError):
            ChainParams(eps=0.0, q=0.2)
        with self.assertRaises(ConfigError):
            ChainParams(eps=0.5, q=0.5)
        with self.assertRaises(CertificateError):
            ChainParams(eps=0.5, q=0.25)
        self.assertFalse(ChainParams(eps=0.5, q=0.3, exploratory=True).certified)

    def test_negative_states_rejected(self):
        with self.assertRaises(ConfigError):
            chain.transition(self.params, -1, 0)


class TestDistributions(unittest.TestCase):
    def setUp(self):
        clear_cache()
        self.params = ChainParams(eps=0.5, q=0.2)

    def test_two_steps(self):
        d = chain.n_step_distribution(self.params, 2)
        np.testing.assert_allclose(d.weights, [0.27, 0.35, 0.38], atol=1e-15)
        self.assertEqual(d.n, 2)

    def test_zero_steps_is_point_mass(self):
        d = chain.n_step_distribution(self.params, 0)
        np.testing.assert_array_equal(d.weights, [1.0])

    def test_mass_is_conserved(self):
        d = chain.n_step_distribution(self.params, 400)
        self.assertAlmostEqual(d.mass, 1.0, places=12)
        self.assertLessEqual(d.support_max, 400)

    def test_truncation_below_n(self):
        with self.assertRaises(ConfigError):
            chain.n_step_distribution(self.params.with_truncation(5), 10)

    def test_cdf_reads(self):
        d = chain.n_step_distribution(self.params, 2)
        self.assertEqual(chain.cdf(d, -1), 0.0)
        self.assertAlmostEqual(chain.cdf(d, 0), 0.27)
        self.assertAlmostEqual(chain.cdf(d, 1.5), 0.62)
        self.assertAlmostEqual(chain.cdf(d, 10), 1.0)

    def test_shift_is_dominated(self):
        d = chain.n_step_distribution(self.params, 30)
        self.assertTrue(chain.dominates(d, chain.shift(d, 1)))
        self.assertFalse(chain.dominates(chain.shift(d, 1), d))
        with self.assertRaises(ConfigError):
            chain.shift(d, -1)

    def test_from_cdf_inverts_cdf(self):
        d = chain.n_step_distribution(self.params, 12)
        np.testing.assert_allclose(chain.from_cdf(d.cdf_values, 12).weights, d.weights, atol=1e-15)


class TestDominanceOrder(unittest.TestCase):
    @given(cdf_arrays())
    def test_reflexive(self, F):
        self.assertTrue(chain.dominates_cdf(F, F))

    @settings(max_examples=200)
    @given(cdf_arrays(), cdf_arrays(), cdf_arrays())
    def test_transitive(self, Fa, Fb, Fc):
        if chain.dominates_cdf(Fa, Fb) and chain.dominates_cdf(Fb, Fc):
            self.assertTrue(chain.dominates_cdf(Fa, Fc, tol=1e-9))

    @given(cdf_arrays(), cdf_arrays())
    def test_antisymmetric(self, Fa, Fb):
        if chain.dominates_cdf(Fa, Fb) and chain.dominates_cdf(Fb, Fa):
            a, b = chain._padded_cdfs(Fa, Fb)
            np.testing.assert_allclose(a, b, atol=1e-9)


class TestCertificate(unittest.TestCase):
    def setUp(self):
        clear_cache()

    def test_spectral_bound_values(self):
        self.assertAlmostEqual(chain.spectral_radius_bound(ChainParams(0.5, 0.2)), 0.8)
        self.assertAlmostEqual(chain.spectral_radius_bound(ChainParams(1.0, 0.01)), 0.04)

    def test_no_bound_at_quarter(self):
        with self.assertRaises(CertificateError):
            chain.spectral_radius_bound(ChainParams(0.5, 0.25, exploratory=True))
        with self.assertRaises(CertificateError):
            chain.chain_certificate(ChainParams(0.5, 0.3, exploratory=True))

    def test_superharmonic_grid(self):
        for q in (0.01, 0.05, 0.1, 0.15, 0.2, 0.24):
            for eps in (0.1, 0.5, 0.9, 1.0):
                params = ChainParams(eps, q)
                report = chain.check_superharmonic(params, chain.spectral_radius_bound(params))
                self.assertEqual(report.status, PASS, (eps, q))
                self.assertEqual(report.checked, 10001)

    def test_superharmonic_fails_below_bound(self):
        params = ChainParams(0.5, 0.2)
        report = chain.check_superharmonic(params, 0.5, kmax=50)
        self.assertEqual(report.status, FAIL)

    def test_return_probability_estimate(self):
        params = ChainParams(0.5, 0.2)
        self.assertAlmostEqual(chain.estimate_spectral_radius(params, 1), 0.5)
        rho_hat = chain.estimate_spectral_radius(params, 400)
        self.assertLessEqual(rho_hat, 0.82)
        self.assertGreater(rho_hat, 0.5)
        self.assertLess(chain.estimate_spectral_radius(ChainParams(1.0, 0.01), 200), 0.1)

    def test_irreducibility_constants(self):
        self.assertEqual(chain.uniform_irreducibility_constants(ChainParams(0.5, 0.2)), (1, 0.2 * 0.2))
        self.assertEqual(chain.uniform_irreducibility_constants(ChainParams(0.01, 0.2)), (1, 0.01))

    def test_certificate_record(self):
        record = chain.chain_certificate(ChainParams(0.5, 0.2))
        self.assertAlmostEqual(record["t"], 0.8)
        self.assertEqual(record["N"], 1)
        self.assertEqual(record["superharmonic"]["status"], PASS)

    def test_tail_bound(self):
        bound = chain.tail_bound(ChainParams(0.5, 0.2), A=2, L=0.1, n=100)
        self.assertAlmostEqual(bound.bound / 2.086e-6, 1.0, places=3)
        self.assertAlmostEqual(bound.L_max, math.log(1 / 0.8) / math.log(2), places=12)
        self.assertAlmostEqual(bound.L_max, 0.3219, places=4)
        self.assertTrue(bound.decays)
        self.assertEqual(chain.tail_bound(ChainParams(0.5, 0.2), A=2, L=0.0, n=100).bound, 0.0)
        self.assertFalse(chain.tail_bound(ChainParams(0.5, 0.2), A=2, L=0.5, n=100).decays)

    def test_tail_bound_inputs(self):
        with self.assertRaises(ConfigError):
            chain.tail_bound(ChainParams(0.5, 0.2), A=0, L=0.1, n=10)


class TestKernelDomination(unittest.TestCase):
    def setUp(self):
        self.params = ChainParams(0.5, 0.2)

    def test_chain_dominates_itself(self):
        report = chain.check_kernel_domination(chain.chain_kernel_table(self.params, 20), self.params)
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.details["states_tested"], 20)
        self.assertAlmostEqual(report.details["min_slack"], 0.0, places=12)

    def test_deterministic_progress_is_dominated(self):
        table = KernelTable(exact=True)
        for k in range(10):
            table.counts[k][k + 1] = 1.0
        self.assertEqual(chain.check_kernel_domination(table, self.params).status, PASS)

    def test_collapse_to_zero_violates(self):
        table = KernelTable(exact=True)
        table.counts[5][0] = 1.0
        report = chain.check_kernel_domination(table, self.params)
        self.assertEqual(report.status, FAIL)
        self.assertEqual(report.violations[0]["state"], 5)

    def test_sparse_states_are_untested(self):
        table = KernelTable()
        table.add_path([0, 1, 2, 3])
        report = chain.check_kernel_domination(table, self.params, min_visits=10)
        self.assertEqual(report.status, CONDITIONAL)
        self.assertEqual(report.details["untested"], [0, 1, 2])

    def test_sampled_chain_paths_match_the_kernel(self):
        paths = chain.sample_chain_paths(self.params, 40, 3000, seed=7)
        self.assertEqual(paths.shape, (3000, 41))
        table = KernelTable()
        for row in paths:
            table.add_path(row.tolist())
        report = chain.check_kernel_domination(table, self.params, z=5.0, min_visits=500)
        self.assertTrue(report.passed)

        exact = chain.n_step_distribution(self.params, 40)
        values, counts = np.unique(paths[:, -1], return_counts=True)
        histogram = {int(v): float(c) for v, c in zip(values, counts)}
        final = chain.check_distribution_domination(exact, histogram, 3000, z=5.0)
        self.assertEqual(final.status, PASS)
        self.assertAlmostEqual(paths[:, -1].mean(), exact.mean(), delta=0.5)

    def test_sampling_is_seeded(self):
        a = chain.sample_chain_paths(self.params, 20, 50, seed=3)
        b = chain.sample_chain_paths(self.params, 20, 50, seed=3)
        np.testing.assert_array_equal(a, b)


if __name__ == "__main__":
    unittest.main()

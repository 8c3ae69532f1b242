import csv
import itertools
import math
import os
import tempfile
import unittest

import numpy as np

from inelastic_maxwell.transport.measures import DiscreteMeasure
from inelastic_maxwell.transport.solvers import (
    convolve_measures,
    marginal,
    mixture,
    scale_measure,
    w2_discrete_lp,
    w2_empirical,
    w2_entropic,
    w2_exact_1d,
    w2_exact_assignment,
    w2_to_dirac,
)
from inelastic_maxwell.utils.errors import ArgumentError


def brute_force_w2_sq(X, Y):
    n = X.shape[0]
    return min(
        float(np.mean(np.sum((X - Y[list(perm)]) ** 2, axis=1)))
        for perm in itertools.permutations(range(n))
    )


class TestDiscreteMeasure(unittest.TestCase):
    """Test the discrete measure type."""

    def test_zero_weights_are_dropped(self):
        mu = DiscreteMeasure([[0.0], [1.0], [2.0]], [0.5, 0.0, 0.5])
        self.assertEqual(mu.size, 2)
        np.testing.assert_array_equal(mu.atoms[:, 0], [0.0, 2.0])

    def test_weights_must_sum_to_one(self):
        with self.assertRaises(ArgumentError):
            DiscreteMeasure([[0.0], [1.0]], [0.5, 0.6])

    def test_negative_weight_rejected(self):
        with self.assertRaises(ValueError):
            DiscreteMeasure([[0.0], [1.0]], [1.5, -0.5])

    def test_mean_and_second_moment(self):
        mu = DiscreteMeasure([[1.0, 0.0, 0.0], [-1.0, 2.0, 0.0]], [0.25, 0.75])
        np.testing.assert_allclose(mu.mean(), [-0.5, 1.5, 0.0])
        self.assertAlmostEqual(mu.second_moment(), 0.25 + 0.75 * 5.0)


class TestExactSolvers(unittest.TestCase):
    """Test the exact W2 solvers."""

    def setUp(self):
        self.rng = np.random.default_rng(1234)

    def test_single_points(self):
        distance = w2_empirical([[0.0, 0.0, 0.0]], [[3.0, 4.0, 0.0]])
        self.assertEqual(distance, 5.0)

    def test_dirac_against_two_point(self):
        distance, _ = w2_exact_assignment([[0.0], [0.0]], [[-1.0], [1.0]])
        self.assertEqual(distance, 1.0)

    def test_one_dimensional_pairing(self):
        self.assertAlmostEqual(w2_exact_1d([0.0, 1.0], [1.0, 2.0]), 1.0, places=15)

    def test_matches_permutation_brute_force(self):
        for dim in (1, 2, 3):
            for _ in range(10):
                n = int(self.rng.integers(2, 7))
                X = self.rng.standard_normal((n, dim))
                Y = self.rng.standard_normal((n, dim))
                distance, plan = w2_exact_assignment(X, Y, method="lsa")
                self.assertAlmostEqual(distance ** 2, brute_force_w2_sq(X, Y), places=12)
                self.assertTrue(plan.check_marginals(None, None))

    def test_sorting_matches_assignment(self):
        xs = self.rng.standard_normal(200)
        ys = self.rng.exponential(size=200)
        by_sorting = w2_exact_1d(xs, ys)
        by_assignment, _ = w2_exact_assignment(xs, ys, method="lsa")
        self.assertAlmostEqual(by_sorting, by_assignment, places=12)

    def test_size_mismatch(self):
        with self.assertRaises(ArgumentError):
            w2_exact_assignment(np.zeros((3, 3)), np.zeros((4, 3)))
        with self.assertRaises(ArgumentError):
            w2_exact_1d([], [])

    def test_unknown_method(self):
        with self.assertRaises(ArgumentError):
            w2_exact_assignment(np.zeros((2, 3)), np.ones((2, 3)), method="greedy")

    def test_dirac_distance(self):
        X = self.rng.standard_normal((50, 3))
        center = X.mean(axis=0)
        expected = math.sqrt(np.mean(np.sum((X - center) ** 2, axis=1)))
        self.assertAlmostEqual(w2_to_dirac(X, center), expected, places=12)
        distance, _ = w2_exact_assignment(X, np.tile(center, (50, 1)))
        self.assertAlmostEqual(distance, expected, places=12)

    def test_lp_agrees_with_assignment_on_uniform_weights(self):
        X = self.rng.standard_normal((7, 3))
        Y = self.rng.standard_normal((7, 3))
        lp, plan = w2_discrete_lp(DiscreteMeasure.empirical(X), DiscreteMeasure.empirical(Y))
        assignment, _ = w2_exact_assignment(X, Y)
        self.assertAlmostEqual(lp, assignment, places=12)
        self.assertTrue(plan.check_marginals(np.full(7, 1 / 7), np.full(7, 1 / 7)))

    def test_lp_weighted_example(self):
        mu = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
        nu = DiscreteMeasure.dirac([0.5])
        distance, _ = w2_discrete_lp(mu, nu)
        self.assertAlmostEqual(distance, 0.5, places=14)

    def test_entropic_close_to_exact(self):
        X = self.rng.standard_normal((40, 2))
        Y = self.rng.standard_normal((40, 2)) + 1.0
        exact = w2_empirical(X, Y)
        approx = w2_entropic(X, Y)
        self.assertGreater(approx, 0.5 * exact)
        self.assertLess(approx, 1.5 * exact)


class TestMeasureOperations(unittest.TestCase):
    """Test scaling, marginals, mixtures and convolution."""

    def setUp(self):
        self.rng = np.random.default_rng(99)

    def random_measure(self, size, dim=3):
        weights = self.rng.dirichlet(np.ones(size))
        return DiscreteMeasure(self.rng.standard_normal((size, dim)), weights / math.fsum(weights))

    def test_scaling_identity(self):
        mu, nu = self.random_measure(5), self.random_measure(6)
        distance, _ = w2_discrete_lp(mu, nu)
        scaled, _ = w2_discrete_lp(scale_measure(mu, 4.0), scale_measure(nu, 4.0))
        self.assertAlmostEqual(scaled, distance / 2.0, places=12)

    def test_marginals_are_superadditive(self):
        for dim in (1, 2, 3):
            for _ in range(10):
                mu, nu = self.random_measure(5, dim), self.random_measure(4, dim)
                total = w2_discrete_lp(mu, nu)[0] ** 2
                parts = sum(w2_discrete_lp(marginal(mu, j), marginal(nu, j))[0] ** 2 for j in range(dim))
                self.assertLessEqual(parts, total + 1e-12)

    def test_symmetry(self):
        for dim in (1, 2, 3):
            mu, nu = self.random_measure(6, dim), self.random_measure(8, dim)
            self.assertAlmostEqual(w2_discrete_lp(mu, nu)[0], w2_discrete_lp(nu, mu)[0], delta=1e-10)
            X, Y = self.rng.standard_normal((30, dim)), self.rng.standard_normal((30, dim))
            self.assertAlmostEqual(w2_empirical(X, Y), w2_empirical(Y, X), delta=1e-10)

    def test_triangle_inequality(self):
        for trial in range(30):
            dim = 1 + trial % 3
            mu, nu, rho = (self.random_measure(int(self.rng.integers(1, 9)), dim) for _ in range(3))
            direct = w2_discrete_lp(mu, nu)[0]
            via = w2_discrete_lp(mu, rho)[0] + w2_discrete_lp(rho, nu)[0]
            self.assertLessEqual(direct, via + 1e-10)

    def test_convolution_merges_atoms(self):
        h = DiscreteMeasure([[0.0], [1.0]])
        f = DiscreteMeasure([[0.0], [1.0]])
        conv = convolve_measures(h, f)
        np.testing.assert_array_equal(conv.atoms[:, 0], [0.0, 1.0, 2.0])
        np.testing.assert_allclose(conv.weights, [0.25, 0.5, 0.25])

    def test_convolution_does_not_expand(self):
        h = self.random_measure(3)
        mu, nu = self.random_measure(4), self.random_measure(4)
        convolved = w2_discrete_lp(convolve_measures(h, mu), convolve_measures(h, nu))[0]
        self.assertLessEqual(convolved, w2_discrete_lp(mu, nu)[0] + 1e-12)

    def test_mixture_convexity(self):
        mu1, nu1 = self.random_measure(4), self.random_measure(4)
        mu2, nu2 = self.random_measure(3), self.random_measure(5)
        alpha = 0.3
        mixed = w2_discrete_lp(mixture(mu1, mu2, alpha), mixture(nu1, nu2, alpha))[0] ** 2
        bound = alpha * w2_discrete_lp(mu1, nu1)[0] ** 2 + (1 - alpha) * w2_discrete_lp(mu2, nu2)[0] ** 2
        self.assertLessEqual(mixed, bound + 1e-12)

    def test_bad_arguments(self):
        mu = self.random_measure(3)
        with self.assertRaises(ArgumentError):
            scale_measure(mu, 0.0)
        with self.assertRaises(ArgumentError):
            mixture(mu, mu, 1.5)
        with self.assertRaises(ArgumentError):
            marginal(mu, 3)


class TestTransportPlanCsv(unittest.TestCase):
    """Test writing a plan to disk."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_plan_rows(self):
        _, plan = w2_exact_assignment([[0.0], [2.0]], [[1.0], [3.0]])
        path = plan.to_csv(os.path.join(self.temp_dir.name, "plan.csv"))
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["source", "target", "mass", "squared_cost"])
        self.assertEqual(len(rows), 3)
        self.assertEqual(float(rows[1][3]), 1.0)


if __name__ == "__main__":
    unittest.main()

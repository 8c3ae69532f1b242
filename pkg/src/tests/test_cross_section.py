import math
import os
import tempfile
import unittest

import numpy as np
from scipy.stats import chi2

from inelastic_maxwell.collision.cross_section import CrossSection, cross_section_from_name
from inelastic_maxwell.collision.kernels import sample_sigma
from inelastic_maxwell.utils.errors import ConfigurationError


class TestCrossSectionModels(unittest.TestCase):
    """Test kernel construction and normalization."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def write_table(self, rows):
        path = os.path.join(self.temp_dir.name, "kernel.tab")
        with open(path, "w") as f:
            f.write("# c b\n")
            for c, b in rows:
                f.write(f"{c} {b}\n")
        return path

    def test_mean_cosines(self):
        self.assertEqual(CrossSection.constant().mean_cosine(), 0.0)
        self.assertAlmostEqual(CrossSection.linear(1.0).mean_cosine(), 1.0 / 3.0, places=10)
        self.assertAlmostEqual(CrossSection.linear(-0.5).mean_cosine(), -1.0 / 6.0, places=10)
        self.assertAlmostEqual(CrossSection.spike(1e-3).mean_cosine(), 1.0 - 5e-4, places=8)

    def test_unnormalized_density_rejected(self):
        with self.assertRaises(ConfigurationError):
            CrossSection.from_density(lambda c: np.full_like(np.asarray(c, dtype=float), 1.0))

    def test_signed_density_rejected(self):
        # Normalized, but negative below c = -1/2
        def density(c):
            return (1.0 + 2.0 * np.asarray(c, dtype=float)) / (4.0 * math.pi)

        with self.assertRaises(ConfigurationError) as ctx:
            CrossSection.from_density(density, name="signed")
        self.assertEqual(ctx.exception.key, "cross_section")
        self.assertIn("negative", str(ctx.exception))

    def test_slope_range(self):
        with self.assertRaises(ConfigurationError):
            CrossSection.linear(1.5)

    def test_table_is_renormalized(self):
        path = self.write_table([(-1.0, 1.0), (1.0, 1.0)])
        xs = CrossSection.from_table(path)
        self.assertAlmostEqual(xs.residual, 4.0 * math.pi - 1.0, places=10)
        self.assertAlmostEqual(xs.mean_cosine(), 0.0, places=12)
        self.assertAlmostEqual(float(xs.density(0.3)), 1.0 / (4.0 * math.pi), places=12)

    def test_linear_table_matches_closed_form(self):
        path = self.write_table([(-1.0, 0.0), (1.0, 2.0)])
        xs = CrossSection.from_table(path)
        self.assertAlmostEqual(xs.mean_cosine(), 1.0 / 3.0, places=12)

    def test_bad_tables(self):
        with self.assertRaises(ConfigurationError):
            CrossSection.from_table(self.write_table([(0.5, 1.0), (0.2, 1.0)]))
        with self.assertRaises(ConfigurationError):
            CrossSection.from_table(self.write_table([(-1.0, 1.0), (1.0, -1.0)]))
        with self.assertRaises(ConfigurationError):
            CrossSection.from_table(os.path.join(self.temp_dir.name, "missing.tab"))

    def test_from_name(self):
        self.assertEqual(cross_section_from_name("constant").kind, "constant")
        self.assertEqual(cross_section_from_name("linear", slope=0.5).name, "linear(0.5)")
        with self.assertRaises(ConfigurationError):
            cross_section_from_name("table")


class TestAngularSampling(unittest.TestCase):
    """Test scattering-direction sampling."""

    def setUp(self):
        self.rng = np.random.default_rng(2024)
        axes = self.rng.standard_normal((20000, 3))
        self.axes = axes / np.linalg.norm(axes, axis=1, keepdims=True)

    def test_uniform_octants(self):
        sigma = sample_sigma(self.axes, CrossSection.constant(), self.rng)
        octants = (sigma > 0).astype(int) @ np.array([1, 2, 4])
        counts = np.bincount(octants, minlength=8)
        expected = sigma.shape[0] / 8
        statistic = np.sum((counts - expected) ** 2 / expected)
        self.assertLess(statistic, chi2.ppf(0.999, 7))

    def test_unit_directions(self):
        sigma = sample_sigma(self.axes, CrossSection.linear(1.0), self.rng)
        np.testing.assert_allclose(np.linalg.norm(sigma, axis=1), 1.0, atol=1e-12)

    def test_linear_kernel_cosine(self):
        sigma = sample_sigma(self.axes, CrossSection.linear(1.0), self.rng)
        cosines = np.einsum("ij,ij->i", sigma, self.axes)
        stderr = cosines.std() / math.sqrt(cosines.size)
        self.assertLess(abs(cosines.mean() - 1.0 / 3.0), 4 * stderr)

    def test_spike_kernel_stays_grazing(self):
        sigma = sample_sigma(self.axes, CrossSection.spike(1e-3), self.rng)
        cosines = np.einsum("ij,ij->i", sigma, self.axes)
        self.assertGreaterEqual(cosines.min(), 1.0 - 1e-3 - 1e-9)

    def test_single_axis(self):
        sigma = sample_sigma(np.array([0.0, 0.0, 1.0]), CrossSection.linear(0.5), self.rng)
        self.assertEqual(sigma.shape, (3,))


if __name__ == "__main__":
    unittest.main()

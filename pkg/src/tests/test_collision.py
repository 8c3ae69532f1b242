import math
import unittest

import numpy as np
from scipy.integrate import trapezoid

from inelastic_maxwell.collision.cross_section import CrossSection
from inelastic_maxwell.collision.kernels import (
    collision_axes,
    frame_from_axis,
    kac_post_collision,
    post_collision_pair,
    post_collision_pairs,
    sample_gain,
    sample_kac_gain,
)
from inelastic_maxwell.collision.params import KacParams, ModelParams
from inelastic_maxwell.collision.rates import (
    angular_contraction_factor,
    contraction_factor_cross_section,
    contraction_factor_gain,
    gain_bound_sq,
    kac_gain_factor,
    kac_gain_factor_closed_form,
    kac_rate,
)
from inelastic_maxwell.utils.errors import ArgumentError, ConfigurationError


class TestModelParams(unittest.TestCase):
    """Test parameter validation and derived constants."""

    def test_time_scale(self):
        self.assertAlmostEqual(ModelParams(e=0.5).E, 32.0 / 3.0, places=12)

    def test_elastic_time_scale_undefined(self):
        with self.assertRaises(ConfigurationError):
            ModelParams(e=1.0).E

    def test_out_of_range(self):
        with self.assertRaises(ConfigurationError) as ctx:
            ModelParams(e=1.2)
        self.assertEqual(ctx.exception.key, "e")
        with self.assertRaises(ConfigurationError):
            ModelParams(e=0.5, p_diff=1.5)

    def test_steady_temperature(self):
        params = ModelParams(e=0.5, B=1.0, A=1.0, p_diff=0.0)
        self.assertAlmostEqual(params.steady_temperature, (32.0 / 3.0) ** (2.0 / 3.0), places=12)

    def test_kac_beta(self):
        self.assertAlmostEqual(KacParams(p_inel=1.0).beta, 0.125, places=10)
        self.assertEqual(KacParams(p_inel=0.0).beta, 0.0)
        with self.assertRaises(ConfigurationError):
            KacParams(p_inel=-1.0)


class TestRates(unittest.TestCase):
    """Test the analytic contraction constants."""

    def test_gain_factor_values(self):
        self.assertEqual(contraction_factor_gain(1.0), 1.0)
        self.assertAlmostEqual(contraction_factor_gain(0.5), math.sqrt(0.8125), places=15)
        self.assertAlmostEqual(contraction_factor_gain(0.0), math.sqrt(0.75), places=15)
        with self.assertRaises(ArgumentError):
            contraction_factor_gain(1.5)

    def test_gamma_constant_kernel(self):
        for e in (0.2, 0.5, 0.9, 1.0):
            gamma = contraction_factor_cross_section(e, CrossSection.constant())
            self.assertAlmostEqual(gamma, (3 + e * e) / 4, places=10)

    def test_gamma_linear_kernel(self):
        gamma = contraction_factor_cross_section(0.5, CrossSection.linear(1.0))
        self.assertAlmostEqual(gamma, 0.8125 + 0.75 / 12, places=10)

    def test_gamma_is_average_of_angular_factor(self):
        xs = CrossSection.linear(1.0)
        e = 0.3
        # Average over the deflection cosine with density 2 pi b(c)
        grid = np.linspace(-1.0, 1.0, 20001)
        weights = 2 * math.pi * xs.density(grid)
        values = np.array([angular_contraction_factor(math.acos(c), e) for c in grid])
        average = trapezoid(values * weights, grid)
        self.assertAlmostEqual(average, contraction_factor_cross_section(e, xs), places=6)

    def test_gain_bound(self):
        self.assertAlmostEqual(gain_bound_sq(2.0, 1.0, 0.5), 0.8125 * 2 + 0.1875, places=15)

    def test_kac_rate(self):
        self.assertAlmostEqual(kac_rate(1.0), 0.125, places=10)
        self.assertEqual(kac_rate(0.0), 0.0)
        for p in (0.5, 2.0, 3.0):
            self.assertAlmostEqual(kac_gain_factor(p), kac_gain_factor_closed_form(p), places=10)
            self.assertGreater(kac_rate(p), 0.0)
        with self.assertRaises(ArgumentError):
            kac_rate(-0.5)


class TestCollisionRule(unittest.TestCase):
    """Test the microscopic collision rules."""

    def test_head_on_example(self):
        v_new, w_new = post_collision_pair([1, 0, 0], [-1, 0, 0], [0, 1, 0], 0.5)
        np.testing.assert_allclose(v_new, [0.25, 0.75, 0.0])
        np.testing.assert_allclose(w_new, [-0.25, -0.75, 0.0])

    def test_momentum_and_energy_balance(self):
        rng = np.random.default_rng(3)
        V, W = rng.standard_normal((200, 3)), rng.standard_normal((200, 3))
        sigma = rng.standard_normal((200, 3))
        sigma /= np.linalg.norm(sigma, axis=1, keepdims=True)
        e = 0.4
        V2, W2 = post_collision_pairs(V, W, sigma, e)
        np.testing.assert_allclose(V2 + W2, V + W, atol=1e-13)
        rel_before = np.linalg.norm(V - W, axis=1)
        loss = (np.sum(V ** 2 + W ** 2, axis=1) - np.sum(V2 ** 2 + W2 ** 2, axis=1))
        cos_term = np.einsum("ij,ij->i", (V - W) / rel_before[:, None], sigma)
        expected = (1 - e * e) / 4 * rel_before ** 2 * (1 - cos_term)
        np.testing.assert_allclose(loss, expected, atol=1e-12)

    def test_equal_velocities_unchanged(self):
        v_new, w_new = post_collision_pair([1, 2, 3], [1, 2, 3], [0, 0, 1], 0.3)
        np.testing.assert_array_equal(v_new, [1, 2, 3])
        np.testing.assert_array_equal(w_new, [1, 2, 3])

    def test_sigma_must_be_unit(self):
        with self.assertRaises(ArgumentError):
            post_collision_pair([1, 0, 0], [0, 0, 0], [0, 0, 2], 0.5)

    def test_collision_axes_fallback(self):
        axes = collision_axes(np.array([[1.0, 0, 0], [2.0, 2.0, 2.0]]), np.array([[0.0, 0, 0], [2.0, 2.0, 2.0]]))
        np.testing.assert_array_equal(axes, [[1, 0, 0], [0, 0, 1]])

    def test_kac_collision(self):
        v_new, w_new = kac_post_collision(1.0, 0.0, math.pi / 4, 0.0)
        self.assertAlmostEqual(v_new, math.sqrt(0.5), places=15)
        self.assertAlmostEqual(w_new, math.sqrt(0.5), places=15)
        v_new, w_new = kac_post_collision(1.0, 0.0, math.pi / 4, 1.0)
        self.assertAlmostEqual(v_new ** 2 + w_new ** 2, 0.5, places=15)


class TestFrame(unittest.TestCase):
    """Test the orthonormal frame construction."""

    def test_frames_are_orthonormal_and_right_handed(self):
        rng = np.random.default_rng(11)
        k = rng.standard_normal((500, 3))
        k[0] = [0, 0, 1]
        k[1] = [0, 0, -1]
        k[2] = [1, 0, 0]
        t1, t2, k = frame_from_axis(k)
        for a, b in ((t1, t2), (t1, k), (t2, k)):
            np.testing.assert_allclose(np.einsum("ij,ij->i", a, b), 0.0, atol=1e-12)
        for a in (t1, t2, k):
            np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.cross(t1, t2), k, atol=1e-12)

    def test_zero_axis(self):
        with self.assertRaises(ArgumentError):
            frame_from_axis([0.0, 0.0, 0.0])


class TestGainSampling(unittest.TestCase):
    """Test sampling of the gain measures."""

    def test_gain_mean_and_energy(self):
        rng = np.random.default_rng(21)
        cloud = rng.standard_normal((4000, 3))
        e = 0.5
        samples = sample_gain(cloud, e, 20000, rng)
        # Q+ keeps the mean and takes E|v'|^2 = E|v|^2 - (1 - e^2)/4 * 3 theta
        np.testing.assert_allclose(samples.mean(axis=0), cloud.mean(axis=0), atol=0.05)
        centered = cloud - cloud.mean(axis=0)
        theta = np.mean(np.sum(centered ** 2, axis=1)) / 3
        expected = np.mean(np.sum(cloud ** 2, axis=1)) - (1 - e * e) / 4 * 3 * theta
        self.assertAlmostEqual(np.mean(np.sum(samples ** 2, axis=1)), expected, delta=0.1)

    def test_gain_rejects_wrong_shape(self):
        with self.assertRaises(ArgumentError):
            sample_gain(np.zeros((10, 2)), 0.5, 5, np.random.default_rng(0))

    def test_kac_gain_shape(self):
        samples = sample_kac_gain(np.linspace(-1, 1, 50), 1.0, 30, np.random.default_rng(0))
        self.assertEqual(samples.shape, (30, 1))


if __name__ == "__main__":
    unittest.main()

import csv
import os
import tempfile
import unittest
from unittest.mock import patch

from inelastic_maxwell.config.experiment import spec_from_dict
from inelastic_maxwell.harness.simulate import build_ensembles, simulate
from inelastic_maxwell.harness.suites import temperature_law_checks, verify
from inelastic_maxwell.utils.errors import ArgumentError


def small_spec(**output):
    return spec_from_dict(
        {
            "experiment": {
                "name": "small",
                "family": "homogeneous",
                "seed": "5",
                "n": "40",
                "schedule": "0:0.2:0.1",
                "dtau": "0.005",
            },
            "model": {"e": "0.3", "B": "1.0"},
            "initial": {"recipe_a": "gaussian", "theta_a": "1.0", "recipe_b": "dirac"},
            "output": output,
        }
    )


def smoke_spec():
    return spec_from_dict(
        {
            "experiment": {
                "name": "smoke",
                "family": "homogeneous",
                "seed": "7",
                "n": "500",
                "schedule": "0:1:0.5",
                "dtau": "0.005",
            },
            "model": {"e": "0.5", "B": "1.0"},
            "initial": {"recipe_a": "gaussian", "theta_a": "1.0", "recipe_b": "uniform-cube", "theta_b": "1.0"},
            "verify": {"e_values": "0.5, 1.0", "trials": "1", "temperature_n": "2000"},
        }
    )


def kac_spec():
    return spec_from_dict(
        {
            "experiment": {
                "name": "kac-smoke",
                "family": "kac",
                "seed": "7",
                "n": "100000",
                "schedule": "0:4:0.5",
                "dtau": "0.05",
            },
            "model": {"p_inel": "1.0"},
            "initial": {"recipe_a": "gaussian", "theta_a": "1.0", "recipe_b": "uniform-cube", "theta_b": "1.0"},
        }
    )


class TestSimulate(unittest.TestCase):
    """Test paired simulation end to end."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.patcher = patch("inelastic_maxwell.config.config.OUTPUT_DIR", self.temp_dir.name)
        self.patcher.start()

    def tearDown(self):
        self.patcher.stop()
        self.temp_dir.cleanup()

    def test_outputs(self):
        spec = small_spec(svg="small.svg", moments_csv="small-moments.csv", snapshot_a="a.snap")
        result = simulate(spec)
        self.assertEqual(set(result.outputs), {"csv", "svg", "moments_csv", "snapshot_a"})
        self.assertEqual(result.outputs["csv"], os.path.join(self.temp_dir.name, "small.csv"))
        with open(result.outputs["csv"]) as f:
            rows = list(csv.reader(f))
        self.assertEqual(len(rows), 4)
        self.assertAlmostEqual(float(rows[-1][0]), 0.2)
        for record in result.run.records:
            self.assertAlmostEqual(record.w2_sq, 3 * record.theta_a, delta=1e-12)

    def test_reproducible(self):
        first = simulate(small_spec(csv="one.csv"))
        second = simulate(small_spec(csv="two.csv"))
        with open(first.outputs["csv"]) as f, open(second.outputs["csv"]) as g:
            self.assertEqual(f.read(), g.read())

    def test_dirac_sits_at_the_first_mean(self):
        ens_a, ens_b = build_ensembles(small_spec())
        self.assertEqual(ens_b.temperature(), 0.0)
        self.assertEqual(list(ens_b.velocities[0]), list(ens_a.mean()))


class TestVerify(unittest.TestCase):
    """Test the verification harness."""

    def test_lemmas_pass(self):
        report = verify("lemmas", small_spec())
        failures = [f"{c.name}: {c.measured} vs {c.bound}" for c in report.failures]
        self.assertTrue(report.passed, failures)
        self.assertEqual(report.suite, "lemmas")
        self.assertEqual(report.seeds, [5, 6])
        self.assertGreater(len(report.checks), 20)
        self.assertTrue(all(c.suite == "lemmas" for c in report.checks))

    def test_lemmas_are_deterministic(self):
        first = verify("lemmas", small_spec())
        second = verify("lemmas", small_spec())
        self.assertEqual([c.measured for c in first.checks], [c.measured for c in second.checks])

    def assert_suite_passes(self, suite, spec):
        report = verify(suite, spec)
        failures = [f"{c.name}: {c.measured} vs {c.bound}" for c in report.failures]
        self.assertTrue(report.passed, failures)
        self.assertTrue(report.checks)
        self.assertTrue(all(c.suite == suite for c in report.checks))
        return report

    def test_gain_passes(self):
        report = self.assert_suite_passes("gain", smoke_spec())
        # Two bounds per e value and three geometry checks per trial
        self.assertEqual(len(report.checks), 2 * 2 + 3)

    def test_flow_passes(self):
        report = self.assert_suite_passes("flow", smoke_spec())
        names = [c.name for c in report.checks]
        self.assertTrue(any(name.startswith("Haff law in original time") for name in names))
        self.assertTrue(any(name.startswith("self-similar Cauchy") for name in names))

    def test_diffusive_passes(self):
        self.assert_suite_passes("diffusive", smoke_spec())

    def test_cross_section_passes(self):
        report = self.assert_suite_passes("cross-section", smoke_spec())
        self.assertIn("log W2 slope", [c.name for c in report.checks])

    def test_kac_passes(self):
        report = self.assert_suite_passes("kac", kac_spec())
        names = [c.name for c in report.checks]
        self.assertTrue(any(name.startswith("W2 decay rate between two solutions") for name in names))

    def test_moments_passes(self):
        self.assert_suite_passes("moments", smoke_spec())

    def test_temperature_law_checks(self):
        checks = temperature_law_checks("flow", smoke_spec())
        # Scaled and original-time comparisons at every quarter up to tau = 3
        self.assertEqual(len(checks), 24)
        self.assertTrue(all(c.passed for c in checks), [c.name for c in checks if not c.passed])
        self.assertIn("N = 2000", checks[0].name)

    def test_unknown_suite(self):
        with self.assertRaises(ArgumentError):
            verify("everything", small_spec())


if __name__ == "__main__":
    unittest.main()

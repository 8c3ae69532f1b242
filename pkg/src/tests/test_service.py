import math
import os
import tempfile
import unittest
from unittest.mock import MagicMock, patch

import numpy as np

from inelastic_maxwell.dynamics.ensemble import VelocityEnsemble
from inelastic_maxwell.service.service import ExperimentService
from inelastic_maxwell.utils.errors import ArgumentError, ConfigurationError


class TestExperimentService(unittest.TestCase):
    """Test the experiment service."""

    def setUp(self):
        self.service = ExperimentService()

    def test_simulate(self):
        with patch("inelastic_maxwell.service.service.parse_config") as mock_parse, \
                patch("inelastic_maxwell.service.service.simulate") as mock_simulate:
            spec = MagicMock()
            mock_parse.return_value = spec
            mock_simulate.return_value = "result"

            self.assertEqual(self.service.simulate("experiment.cfg"), "result")
            mock_parse.assert_called_once_with("experiment.cfg")
            mock_simulate.assert_called_once_with(spec)

    def test_verify_writes_reports(self):
        with patch("inelastic_maxwell.service.service.parse_config") as mock_parse, \
                patch("inelastic_maxwell.service.service.verify") as mock_verify:
            spec = MagicMock()
            spec.output_path.side_effect = lambda key, suffix=None: f"/out/{key}{suffix}"
            mock_parse.return_value = spec
            report = MagicMock()
            mock_verify.return_value = report

            self.assertIs(self.service.verify("lemmas", "experiment.cfg"), report)
            mock_verify.assert_called_once_with("lemmas", spec)
            report.to_csv.assert_called_once_with("/out/report_csv-lemmas-report.csv")
            report.to_json.assert_called_once_with("/out/report_json-lemmas-report.json")

    def test_error_propagation(self):
        with patch("inelastic_maxwell.service.service.parse_config") as mock_parse:
            mock_parse.side_effect = ConfigurationError("bad value", key="e", line=3)
            with self.assertRaises(ConfigurationError):
                self.service.simulate("experiment.cfg")
            with self.assertRaises(ConfigurationError):
                self.service.verify("lemmas", "experiment.cfg")

    def test_coeffs(self):
        values = self.service.coeffs(e=0.5, p=1.0)
        self.assertAlmostEqual(values["E"], 32.0 / 3.0, places=12)
        self.assertAlmostEqual(values["cooling_rate"], -1.75, places=12)
        self.assertAlmostEqual(values["gain_factor"], math.sqrt(0.8125), places=12)
        self.assertAlmostEqual(values["gamma_constant"], 0.8125, places=10)
        self.assertAlmostEqual(values["lambda"], 0.5390625, places=12)
        self.assertAlmostEqual(values["beta"], 0.125, places=10)

    def test_elastic_coeffs(self):
        values = self.service.coeffs(e=1.0)
        self.assertNotIn("E", values)
        self.assertNotIn("cooling_rate", values)
        self.assertEqual(values["gain_factor"], 1.0)
        self.assertEqual(set(self.service.coeffs(p=0.0)), {"beta"})
        with self.assertRaises(ArgumentError):
            self.service.coeffs()
        with self.assertRaises(ConfigurationError):
            self.service.coeffs(e=1.5)

    def test_w2(self):
        a = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
        b = [[1.0, 0.0, 2.0], [0.0, 0.0, 2.0]]
        self.assertAlmostEqual(self.service.w2(a, b), 2.0, places=12)
        with self.assertRaises(ArgumentError):
            self.service.w2(a, b[:1])

    def test_w2_snapshots(self):
        with tempfile.TemporaryDirectory() as tmp:
            a = VelocityEnsemble(np.zeros((4, 3))).save(os.path.join(tmp, "a.snap"))
            b = VelocityEnsemble(np.full((4, 3), 1.0)).save(os.path.join(tmp, "b.snap"))
            c = VelocityEnsemble(np.zeros((2, 3))).save(os.path.join(tmp, "c.snap"))
            self.assertAlmostEqual(self.service.w2_snapshots(a, b), math.sqrt(3.0), places=12)
            with self.assertRaises(ArgumentError):
                self.service.w2_snapshots(a, c)

    def test_moments(self):
        result = self.service.moments(0.5, 3.0, 3.0, 15.0, [0.0, 1.0])
        self.assertEqual(result["tau"], [0.0, 1.0])
        self.assertAlmostEqual(result["m4"][0], 15.0, places=12)
        self.assertAlmostEqual(result["fixed_point"], 135.0 / 7.0, places=10)
        expected = 135.0 / 7.0 + (15.0 - 135.0 / 7.0) * math.exp(-1.75)
        self.assertAlmostEqual(result["m4"][1], expected, places=10)


if __name__ == "__main__":
    unittest.main()

import glob
import os
import tempfile
import textwrap
import unittest
from unittest.mock import patch

from inelastic_maxwell.config import config
from inelastic_maxwell.config.experiment import parse_config
from inelastic_maxwell.utils.errors import ConfigurationError

VALID = """\
[experiment]
name = smoke
family = homogeneous
seed = 3
n = 100
schedule = 0:1:0.5
dtau = 0.005

[model]
e = 0.5
B = 1.0

[initial]
recipe_a = gaussian
theta_a = 1.0
recipe_b = uniform-cube
mean_b = 1.0, 0.0, 0.0   # shifted
theta_b = 2.0
"""


class TestExperimentFiles(unittest.TestCase):
    """Test parsing and validation of experiment files."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def write(self, text, name="experiment.cfg"):
        path = os.path.join(self.temp_dir.name, name)
        with open(path, "w") as f:
            f.write(textwrap.dedent(text))
        return path

    def test_valid_file(self):
        spec = parse_config(self.write(VALID))
        self.assertEqual(spec.name, "smoke")
        self.assertEqual(spec.family, "homogeneous")
        self.assertEqual(spec.experiment.schedule, [0.0, 0.5, 1.0])
        self.assertEqual(spec.initial.mean_b, [1.0, 0.0, 0.0])
        self.assertEqual(spec.dimension, 3)
        self.assertEqual(spec.verify.trials, 5)
        self.assertAlmostEqual(spec.model_params().E, 32.0 / 3.0)
        self.assertEqual(spec.model_params(e=0.9).e, 0.9)
        self.assertEqual(spec.cross_section_model().kind, "constant")

    def test_out_of_range_value_names_key_and_line(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(VALID.replace("e = 0.5", "e = 1.2")))
        self.assertEqual(ctx.exception.key, "e")
        self.assertEqual(ctx.exception.line, 10)

    def test_unknown_key(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(VALID.replace("seed = 3", "seed = 3\ncolour = red")))
        self.assertEqual(ctx.exception.key, "colour")
        self.assertEqual(ctx.exception.line, 5)

    def test_missing_required_key(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(VALID.replace("B = 1.0\n", "")))
        self.assertEqual(ctx.exception.key, "B")

    def test_schedule_must_increase(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(VALID.replace("0:1:0.5", "0, 1, 0.5")))
        self.assertEqual(ctx.exception.key, "schedule")

    def test_kac_dimension(self):
        text = """\
        [experiment]
        name = kac
        family = kac
        dimension = 3
        seed = 1
        n = 10
        schedule = 0
        dtau = 0.05

        [model]
        p_inel = 1.0

        [initial]
        recipe_a = gaussian
        theta_a = 1.0
        recipe_b = dirac
        """
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(text))
        self.assertEqual(ctx.exception.key, "dimension")
        self.assertEqual(ctx.exception.line, 4)

    def test_thermostat_outside_diffusive_family(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(VALID.replace("B = 1.0", "B = 1.0\nA = 1.0")))
        self.assertEqual(ctx.exception.key, "A")

    def test_cross_section_section_needs_kind(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(VALID + "\n[cross_section]\nslope = 0.5\n"))
        self.assertEqual(ctx.exception.key, "kind")
        spec = parse_config(self.write(VALID + "\n[cross_section]\nkind = linear\nslope = 0.5\n"))
        self.assertEqual(spec.cross_section_model().name, "linear(0.5)")

    def test_verify_defaults(self):
        spec = parse_config(self.write(VALID))
        self.assertEqual(spec.verify.e_values, [0.2, 0.5, 0.9, 1.0])
        self.assertEqual(spec.verify.workers, 1)
        self.assertEqual(spec.verify.temperature_n, 100000)
        spec = parse_config(self.write(VALID + "\n[verify]\ntemperature_n = 2000\n"))
        self.assertEqual(spec.verify.temperature_n, 2000)

    def test_mean_length(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self.write(VALID.replace("1.0, 0.0, 0.0", "1.0, 0.0")))
        self.assertEqual(ctx.exception.key, "mean_b")

    def test_unreadable_and_malformed_files(self):
        with self.assertRaises(ConfigurationError):
            parse_config(os.path.join(self.temp_dir.name, "missing.cfg"))
        with self.assertRaises(ConfigurationError):
            parse_config(self.write(VALID + "\n[model]\ne = 0.3\n"))

    def test_relative_paths_follow_the_file(self):
        text = VALID.replace("recipe_b = uniform-cube", "recipe_b = file\npath_b = snaps/b.snap")
        spec = parse_config(self.write(text))
        self.assertEqual(spec.initial.path_b, os.path.join(self.temp_dir.name, "snaps", "b.snap"))

    def test_output_paths(self):
        spec = parse_config(self.write(VALID + "\n[output]\nsvg = plots/smoke.svg\nmoments_csv = /abs/m.csv\n"))
        with patch("inelastic_maxwell.config.config.OUTPUT_DIR", "/tmp/out"):
            self.assertEqual(spec.output_path("csv", ".csv"), os.path.join("/tmp/out", "smoke.csv"))
            self.assertEqual(spec.output_path("svg"), os.path.join("/tmp/out", "plots/smoke.svg"))
            self.assertEqual(spec.output_path("moments_csv"), "/abs/m.csv")
            self.assertIsNone(spec.output_path("snapshot_a"))

    def test_shipped_experiments_parse(self):
        paths = sorted(glob.glob(os.path.join(config.CONFIG_DIR, "*.cfg")))
        self.assertTrue(paths)
        for path in paths:
            spec = parse_config(path)
            self.assertEqual(spec.name, os.path.splitext(os.path.basename(path))[0])
            spec.params()


if __name__ == "__main__":
    unittest.main()

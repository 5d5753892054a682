import json
import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np

from walklab.app import create_app
from walklab.core.config import Config
from walklab.core.errors import CertificateError, ConfigError, EstimatorError, ProjectionExhaustedError
from walklab.models.experiment import ExperimentConfig
from walklab.utils import helpers
from walklab.utils.artifacts import MANIFEST, SUMMARY, RunWriter, dumps, read_manifest

DEFAULTS = {"seed": 7, "trials": 100, "out": "runs", "workers": 2, "batch_size": 50, "strict": True}


def diagnostics_of(data, overrides=None, defaults=DEFAULTS):
    try:
        ExperimentConfig.from_dict(data, overrides, defaults)
    except ConfigError as e:
        return e.diagnostics
    return []


class TestExperimentConfig(unittest.TestCase):
    def test_schema_defaults_fill_in(self):
        cfg = ExperimentConfig.from_dict({"kind": "chain"}, defaults=DEFAULTS)
        self.assertEqual(cfg.kind, "chain")
        self.assertEqual(cfg.n, 400)
        self.assertEqual(cfg.eps, 0.5)
        self.assertEqual(cfg.mu, "srw")
        self.assertEqual(cfg.seed, 7)
        self.assertIsNone(cfg.crossover)
        self.assertEqual(cfg.get("crossover", "none"), "none")

    def test_precedence(self):
        data = {"kind": "chain", "trials": 20}
        self.assertEqual(ExperimentConfig.from_dict(data, defaults=DEFAULTS).trials, 20)
        self.assertEqual(ExperimentConfig.from_dict(data, {"trials": 30}, DEFAULTS).trials, 30)
        # a None flag means "not given"
        self.assertEqual(ExperimentConfig.from_dict(data, {"trials": None}, DEFAULTS).trials, 20)

    def test_ints_promoted_for_numeric_fields(self):
        cfg = ExperimentConfig.from_dict({"kind": "chain", "eps": 1}, defaults=DEFAULTS)
        self.assertIsInstance(cfg.eps, float)

    def test_bool_is_not_an_int(self):
        self.assertIn("n: expected int, got bool", diagnostics_of({"kind": "chain", "n": True}))

    def test_collects_every_problem(self):
        found = diagnostics_of({"kind": "chain", "trials": 0, "colour": "red", "schema_version": 2})
        self.assertIn("trials: must be positive", found)
        self.assertIn("unknown key: colour", found)
        self.assertIn("schema_version: expected 1, got 2", found)

    def test_kind_required(self):
        self.assertIn("kind: required", diagnostics_of({}))
        self.assertTrue(any(d.startswith("kind: must be one of") for d in diagnostics_of({"kind": "nope"})))

    def test_run_settings_required(self):
        found = diagnostics_of({"kind": "chain"}, defaults={})
        for key in ("seed", "trials", "out", "workers", "batch_size", "strict"):
            self.assertIn(f"{key}: required", found)

    def test_list_and_consts_shapes(self):
        self.assertIn("n_list: must be a list of nonnegative integers",
                      diagnostics_of({"kind": "walk", "n_list": [10, -1]}))
        self.assertIn("consts: must be three numbers [A, B, C]", diagnostics_of({"kind": "walk", "consts": [1, 0]}))

    def test_top_level_must_be_object(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict([1, 2], defaults=DEFAULTS)

    def test_replace(self):
        cfg = ExperimentConfig.from_dict({"kind": "chain"}, defaults=DEFAULTS)
        other = cfg.replace(q=0.1)
        self.assertEqual(other.q, 0.1)
        self.assertEqual(cfg.q, 0.2)
        with self.assertRaises(ConfigError):
            cfg.replace(trials=-5)

    def test_as_dict_is_sorted(self):
        keys = list(ExperimentConfig.from_dict({"kind": "chain"}, defaults=DEFAULTS).as_dict())
        self.assertEqual(keys, sorted(keys))


class TestConfigFiles(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "experiment.json")

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, text):
        with open(self.path, "w", encoding="utf-8") as fh:
            fh.write(text)

    def test_load(self):
        self.write(json.dumps({"schema_version": 1, "kind": "casson", "z_n": 100}))
        cfg = ExperimentConfig.load(self.path, {"seed": 3}, DEFAULTS)
        self.assertEqual((cfg.kind, cfg.z_n, cfg.seed), ("casson", 100, 3))

    def test_empty_file(self):
        self.write("  \n")
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.load(self.path, defaults=DEFAULTS)
        self.assertEqual(str(ctx.exception), "Config file is empty")

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.load(os.path.join(self.tmp.name, "absent.json"), defaults=DEFAULTS)

    def test_bad_json(self):
        self.write("{kind: chain")
        with self.assertRaises(ConfigError) as ctx:
            ExperimentConfig.load(self.path, defaults=DEFAULTS)
        self.assertTrue(ctx.exception.diagnostics)

    def test_no_file_uses_flags(self):
        cfg = ExperimentConfig.load(None, {"kind": "geom"}, DEFAULTS)
        self.assertEqual(cfg.kind, "geom")


class TestAppConfig(unittest.TestCase):
    def test_validate_reports_problems(self):
        with patch.object(Config, "DEFAULT_TRIALS", 0), patch.object(Config, "Z_SCORE", -1.0):
            problems = Config.validate()
        self.assertIn("WALKLAB_TRIALS must be positive", problems)
        self.assertIn("WALKLAB_Z_SCORE must be positive", problems)

    def test_named_configs(self):
        self.assertFalse(create_app("exploratory").config["STRICT"])
        self.assertTrue(create_app("strict").config["STRICT"])
        with self.assertRaises(ValueError):
            create_app("production")

    def test_exit_codes(self):
        self.assertEqual(ConfigError("x").exit_code, 2)
        self.assertEqual(EstimatorError("x").exit_code, 3)
        self.assertEqual(ProjectionExhaustedError("x").exit_code, 3)
        self.assertEqual(CertificateError("x").exit_code, 4)


class TestHelpers(unittest.TestCase):
    def test_parse_kv(self):
        self.assertEqual(helpers.parse_kv("K=1, c=0.9,c0=0.1"), {"K": 1.0, "c": 0.9, "c0": 0.1})
        self.assertEqual(helpers.parse_kv(""), {})
        with self.assertRaises(ConfigError):
            helpers.parse_kv("K=1,c")
        with self.assertRaises(ConfigError):
            helpers.parse_kv("K=one")

    def test_parse_int_list(self):
        self.assertEqual(helpers.parse_int_list("20,40,60"), [20, 40, 60])
        self.assertEqual(helpers.parse_int_list("20:101:20"), [20, 40, 60, 80, 100])
        self.assertEqual(helpers.parse_int_list("0:3"), [0, 1, 2])
        with self.assertRaises(ConfigError):
            helpers.parse_int_list("a,b")

    def test_wilson_interval(self):
        self.assertEqual(helpers.wilson_interval(0, 0), (0.0, 1.0))
        lo, hi = helpers.wilson_interval(30, 100, z=2.0)
        self.assertLess(lo, 0.3)
        self.assertGreater(hi, 0.3)
        lo, hi = helpers.wilson_interval(0, 100, z=3.0)
        self.assertAlmostEqual(lo, 0.0, places=12)
        self.assertGreater(hi, 0.0)
        self.assertEqual(helpers.proportion_interval(0.25, 1, exact=True), (0.25, 0.25))

    def test_fit_exponential(self):
        ns = [1, 2, 3, 4, 5]
        fit = helpers.fit_exponential(ns, [2 * 0.5 ** n for n in ns])
        self.assertAlmostEqual(fit.K, 2.0, places=9)
        self.assertAlmostEqual(fit.c, 0.5, places=9)
        self.assertAlmostEqual(fit.r_squared, 1.0, places=9)
        self.assertEqual(fit.window, (1, 5))
        self.assertIsNone(helpers.fit_exponential(ns, [0.5, 0, 0, 0, 0]))

    def test_positive_window(self):
        self.assertEqual(helpers.positive_window([1, 2, 3, 4, 5], [0.1, 0, 0.2, 0.1, 0.05]), (2, 5))

    def test_trial_streams(self):
        a = helpers.trial_rng(5, helpers.stream_id("walk"), 12).random(4)
        b = helpers.trial_rng(5, helpers.stream_id("walk"), 12).random(4)
        c = helpers.trial_rng(5, helpers.stream_id("walk"), 13).random(4)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))


class TestArtifacts(unittest.TestCase):
    def test_writer(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "run")
            writer = RunWriter(out)
            writer.table("rows", [["n", "p"], [1, 0.5]])
            writer.line("hello")
            writer.write({"kind": "chain", "value": np.float64(0.25)})
            self.assertEqual(sorted(os.listdir(out)), [MANIFEST, "rows.csv", SUMMARY])
            manifest = read_manifest(out)
            self.assertEqual(manifest["files"], ["rows.csv", SUMMARY])
            self.assertEqual(manifest["value"], 0.25)
            with open(os.path.join(out, "rows.csv"), encoding="utf-8") as fh:
                self.assertEqual(fh.read(), "n,p\n1,0.5\n")
            with open(os.path.join(out, SUMMARY), encoding="utf-8") as fh:
                self.assertEqual(fh.read(), "hello\n")

    def test_missing_manifest(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ConfigError):
                read_manifest(tmp)

    def test_non_finite_values(self):
        self.assertEqual(json.loads(dumps({"a": float("nan"), "b": float("inf")})), {"a": "nan", "b": "inf"})


if __name__ == "__main__":
    unittest.main()

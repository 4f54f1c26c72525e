# src/apps/experiments/tests.py
import io
import json
import logging
import math
import os
import tempfile
from contextlib import redirect_stderr
from unittest import skipIf

from django.core.management import call_command
from django.test import SimpleTestCase

from apps.fitting.fits import peak_areas
from apps.optics.samples import PATTERN_HEADER, read_samples

from .base import CONFIG_ERROR, DOMAIN_ERROR, IO_ERROR
from .experiment import MissingSeed


class CommandTestCase(SimpleTestCase):
    """Runs commands in-process against a scratch directory."""

    def setUp(self):
        scratch = tempfile.TemporaryDirectory()
        self.addCleanup(scratch.cleanup)
        self.scratch = scratch.name

    def path(self, name):
        return os.path.join(self.scratch, name)

    def write_config(self, document, name="config.json"):
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as stream:
            json.dump(document, stream)
        return path

    def call(self, *args):
        stdout = io.StringIO()
        call_command(*args, stdout=stdout, stderr=io.StringIO())
        return stdout.getvalue()

    def call_json(self, *args):
        return json.loads(self.call(*args))

    def call_failing(self, *args):
        # Argument errors are reported before call_command hands over its streams.
        stderr = io.StringIO()
        with redirect_stderr(stderr), self.assertRaises(SystemExit) as cm:
            call_command(*args, stdout=io.StringIO())
        return cm.exception.code, json.loads(stderr.getvalue())

    def read_pattern(self, text):
        return read_samples(io.StringIO(text))


class PatternCommandTests(CommandTestCase):

    def test_balanced_output_is_dark_on_axis(self):
        text = self.call("pattern", "--oracle", "01", "--plane", "fourier")
        self.assertEqual(text.splitlines()[0], ",".join(PATTERN_HEADER))
        samples = self.read_pattern(text)
        self.assertEqual(len(samples), 51)
        centre = next(s for s in samples if s.x == 0.0)
        self.assertLess(centre.value, 1e-9 * max(s.value for s in samples))

    def test_constant_output_peaks_on_axis(self):
        samples = self.read_pattern(self.call("pattern", "--oracle", "00"))
        self.assertEqual(max(samples, key=lambda s: s.value).x, 0.0)

    def test_image_plane_has_equal_peaks(self):
        text = self.call(
            "pattern", "--oracle", "01", "--plane", "image", "--x-min=-300.5e-6", "--x-max=300.5e-6", "--step=1e-6"
        )
        area_neg, area_pos = peak_areas(self.read_pattern(text))
        self.assertGreater(area_neg, 0.4)
        self.assertAlmostEqual(area_neg, area_pos, delta=1e-12)

    def test_output_file(self):
        out = self.path("pattern.csv")
        self.assertEqual(self.call("pattern", "--herald-x", "0.11e-3", "--out", out), "")
        with open(out, newline="", encoding="utf-8") as stream:
            self.assertEqual(len(read_samples(stream)), 51)

    def test_selector_is_required(self):
        code, error = self.call_failing("pattern", "--plane", "fourier")
        self.assertEqual(code, CONFIG_ERROR)
        self.assertEqual(error["error"], "invalid_arguments")
        self.assertIn("--oracle", error["detail"])

    def test_unknown_plane(self):
        code, error = self.call_failing("pattern", "--oracle", "01", "--plane", "bogus")
        self.assertEqual(code, CONFIG_ERROR)
        self.assertEqual(error["error"], "invalid_arguments")
        self.assertIn("bogus", error["detail"])

    def test_invalid_oracle(self):
        code, error = self.call_failing("pattern", "--oracle", "12")
        self.assertEqual(code, DOMAIN_ERROR)
        self.assertEqual(error["error"], "unphysical_parameter")


class HeraldCommandTests(CommandTestCase):

    def test_detector_slit_window(self):
        report = self.call_json("herald", "--herald-width", "100e-6")
        self.assertEqual(report["window_width"], 100e-6)
        self.assertGreater(report["heralded_state"]["purity"], 0.9)
        self.assertLess(report["heralded_state"]["purity"], 0.95)
        self.assertEqual(report["commutes"], {"00": True, "01": True, "10": True, "11": True})

    def test_point_herald_at_the_crossing(self):
        report = self.call_json("herald", "--herald-x", "0.11e-3", "--herald-width", "0")
        self.assertAlmostEqual(report["herald_phase"], math.pi / 2, delta=1e-12)
        self.assertAlmostEqual(report["heralded_state"]["purity"], 1.0, delta=1e-12)


class TableCommandTests(CommandTestCase):

    def test_constant_rows_dominate(self):
        table = self.call_json("table", "--seed", "1")
        self.assertTrue(table["calibrated"])
        counts = {row["f"]: row["coincidences"] for row in table["rows"]}
        self.assertEqual(list(counts), ["00", "01", "10", "11"])
        for constant in ("00", "11"):
            for balanced in ("01", "10"):
                self.assertGreater(counts[constant], 5 * counts[balanced])
        self.assertAlmostEqual(table["herald_rate"], 31.2, delta=0.2)

    def test_same_seed_same_output(self):
        self.assertEqual(self.call("table", "--seed", "42"), self.call("table", "--seed", "42"))

    def test_closed_detector(self):
        config = self.write_config({"detector": {"width": 0.0}})
        table = self.call_json("table", "--config", config, "--seed", "1")
        self.assertEqual([row["coincidences"] for row in table["rows"]], [0, 0, 0, 0])

    def test_uncalibrated_run_uses_configured_rate(self):
        table = self.call_json("table", "--seed", "1", "--no-calibrate")
        self.assertFalse(table["calibrated"])
        self.assertEqual(table["visibility"], 1.0)
        self.assertEqual(table["herald_rate"], 31.25)

    def test_seed_is_required(self):
        code, error = self.call_failing("table")
        self.assertEqual(code, DOMAIN_ERROR)
        self.assertEqual(error["error"], "missing_seed")
        self.assertEqual(error, MissingSeed().as_dict())

    def test_unknown_flag(self):
        code, error = self.call_failing("table", "--seed", "1", "--seed-x", "2")
        self.assertEqual(code, CONFIG_ERROR)
        self.assertEqual(error["error"], "invalid_arguments")
        self.assertIn("--seed-x", error["detail"])

    def test_seed_from_config(self):
        config = self.write_config({"monte_carlo": {"seed": 42}})
        self.assertEqual(self.call("table", "--config", config), self.call("table", "--seed", "42"))


class ScanCommandTests(CommandTestCase):

    def test_ideal_optimum(self):
        config = self.write_config({"scan": {"w_min": 200e-6, "w_max": 240e-6, "step": 5e-6}})
        out = self.path("scan.csv")
        self.call("scan", "--config", config, "--out", out)
        with open(out, encoding="utf-8") as stream:
            lines = stream.read().splitlines()
        self.assertEqual(lines[0], "width_m,p_success")
        self.assertEqual(len(lines), 10)
        with open(self.path("scan.summary.json"), encoding="utf-8") as stream:
            summary = json.load(stream)
        self.assertAlmostEqual(summary["optimal_width_m"], 220e-6, delta=1e-12)
        self.assertAlmostEqual(summary["optimal_p"], 0.6265, delta=2e-3)

    def test_summary_carries_the_optimum_table_and_posteriors(self):
        config = self.write_config({"scan": {"w_min": 200e-6, "w_max": 240e-6, "step": 5e-6}})
        summary = self.call_json("scan", "--config", config)
        table, bet = summary["probabilities"], summary["bet"]
        self.assertEqual(table["p00"], table["p11"])
        self.assertGreater(table["p_c"], table["p_b"])
        self.assertAlmostEqual(bet["p_success"], summary["optimal_p"], delta=1e-12)
        self.assertEqual(bet["decision_rule"], "constant")
        self.assertAlmostEqual(
            bet["posterior_constant_given_detection"], table["p_c"] / (table["p_c"] + table["p_b"]), delta=1e-12
        )

    def test_calibrated_optimum(self):
        config = self.write_config({"scan": {"w_min": 150e-6, "w_max": 300e-6, "step": 10e-6}})
        summary = self.call_json("scan", "--config", config, "--calibrate")
        self.assertAlmostEqual(summary["optimal_p"], 0.58, delta=0.01)
        self.assertAlmostEqual(summary["visibility"], 0.601, delta=0.005)

    def test_blind_detector_is_flat(self):
        config = self.write_config({
            "detector": {"efficiency": 0.0},
            "scan": {"w_min": 50e-6, "w_max": 300e-6, "step": 50e-6},
        })
        out = self.path("blind.csv")
        self.call("scan", "--config", config, "--out", out)
        with open(out, encoding="utf-8") as stream:
            values = {line.split(",")[1] for line in stream.read().splitlines()[1:]}
        self.assertEqual(values, {"0.5"})


class GameCommandTests(CommandTestCase):

    def test_calibrated_game(self):
        result = self.call_json("game", "--calibrate", "--trials", "100000", "--seed", "4")
        self.assertEqual(result["trials"], 100000)
        self.assertEqual(result["rule"], "constant")
        self.assertAlmostEqual(result["analytic"], 0.55, delta=1e-6)
        self.assertLessEqual(abs(result["frequency"] - 0.55), 3 * result["std_error"])

    def test_blind_game(self):
        config = self.write_config({"detector": {"efficiency": 0.0}})
        result = self.call_json("game", "--config", config, "--trials", "20000", "--seed", "3", "--rule", "balanced")
        self.assertEqual(result["analytic"], 0.5)
        self.assertLessEqual(abs(result["frequency"] - 0.5), 3 * result["std_error"])

    def test_seed_is_required(self):
        code, error = self.call_failing("game", "--trials", "10")
        self.assertEqual(code, DOMAIN_ERROR)
        self.assertEqual(error["error"], "missing_seed")

    def test_trials_must_be_positive(self):
        code, error = self.call_failing("game", "--trials", "0", "--seed", "1")
        self.assertEqual(code, CONFIG_ERROR)
        self.assertIn("trials", error["detail"]["monte_carlo"])


class FitCommandTests(CommandTestCase):

    def test_heralded_pattern_against_reference(self):
        reference, shifted = self.path("reference.csv"), self.path("shifted.csv")
        self.call("pattern", "--oracle", "00", "--out", reference)
        self.call("pattern", "--herald-x", "0.11e-3", "--out", shifted)
        result = self.call_json("fit", reference, shifted)
        # Heralding at the crossing adds pi/2 to the path phase; the fringes move by -pi/2.
        self.assertAlmostEqual(result["delta_phi"], 3 * math.pi / 2, delta=1e-6)
        self.assertAlmostEqual(result["visibility"], 1.0, delta=1e-6)

    def test_malformed_file(self):
        reference = self.path("reference.csv")
        self.call("pattern", "--oracle", "00", "--out", reference)
        broken = self.path("broken.csv")
        with open(broken, "w", encoding="utf-8") as stream:
            stream.write("x,y\n0,1\n")
        code, error = self.call_failing("fit", reference, broken)
        self.assertEqual(code, DOMAIN_ERROR)
        self.assertEqual(error["error"], "parse_failed")

    def test_missing_file(self):
        code, error = self.call_failing("fit", self.path("nope.csv"), self.path("nope.csv"))
        self.assertEqual(code, IO_ERROR)
        self.assertEqual(error["error"], "io_error")


class CalibrateCommandTests(CommandTestCase):

    def test_quoted_measurements(self):
        report = self.call_json("calibrate")
        self.assertAlmostEqual(report["focal_length"], 4 * 250e-6 * 0.11e-3 / 650e-9, delta=1e-12)
        self.assertAlmostEqual(report["crossing_point"], 0.11e-3, delta=1e-12)
        self.assertAlmostEqual(report["visibility"], 0.601, delta=0.005)
        self.assertAlmostEqual(report["table_visibility"], 0.917, delta=0.005)
        self.assertAlmostEqual(report["herald_rate"], 31.2, delta=0.2)
        attenuation = report["attenuation"]
        self.assertAlmostEqual(attenuation["amplitude_ratio"], 0.967, delta=1e-3)
        self.assertAlmostEqual(attenuation["population_0"], 0.517, delta=1e-3)
        self.assertAlmostEqual(attenuation["population_1"], 0.483, delta=1e-3)


class ConfigTests(CommandTestCase):
    """Config validation and the effective-config round trip."""

    def test_unknown_keys_are_rejected(self):
        config = self.write_config({"geometry": {"slit_widht": 100e-6}, "colour": "red"})
        code, error = self.call_failing("calibrate", "--config", config)
        self.assertEqual(code, CONFIG_ERROR)
        self.assertEqual(error["error"], "invalid_config")
        self.assertIn("colour", error["detail"])
        self.assertIn("slit_widht", error["detail"]["geometry"])

    def test_overlapping_slits(self):
        config = self.write_config({"geometry": {"slit_width": 300e-6}})
        code, error = self.call_failing("herald", "--config", config)
        self.assertEqual(code, CONFIG_ERROR)
        self.assertIn("geometry", error["detail"])

    def test_focal_length_replaces_crossing_point(self):
        config = self.write_config({"geometry": {"focal_length": 0.2}})
        report = self.call_json("calibrate", "--config", config)
        self.assertEqual(report["focal_length"], 0.2)

    def test_focal_length_and_crossing_point_conflict(self):
        config = self.write_config({"geometry": {"focal_length": 0.2, "crossing_point": 0.11e-3}})
        code, _ = self.call_failing("calibrate", "--config", config)
        self.assertEqual(code, CONFIG_ERROR)

    def test_invalid_efficiency(self):
        config = self.write_config({"detector": {"efficiency": 1.5}})
        code, error = self.call_failing("scan", "--config", config)
        self.assertEqual(code, CONFIG_ERROR)
        self.assertIn("efficiency", error["detail"]["detector"])

    def test_not_json(self):
        path = self.path("config.json")
        with open(path, "w", encoding="utf-8") as stream:
            stream.write("{geometry: 1")
        code, error = self.call_failing("calibrate", "--config", path)
        self.assertEqual(code, CONFIG_ERROR)
        self.assertIn("config", error["detail"])

    def test_dumped_config_reproduces_output(self):
        dumped = self.path("effective.json")
        first = self.call("table", "--seed", "7", "--dump-config", dumped)
        with open(dumped, encoding="utf-8") as stream:
            text = stream.read()
        self.assertEqual(text, json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n")
        self.assertEqual(json.loads(text)["monte_carlo"]["seed"], 7)
        self.assertEqual(self.call("table", "--config", dumped), first)

    def test_dumped_pattern_grid(self):
        dumped = self.path("effective.json")
        first = self.call("pattern", "--oracle", "10", "--step=20e-6", "--dump-config", dumped)
        self.assertEqual(self.call("pattern", "--oracle", "10", "--config", dumped), first)

    def test_unwritable_output(self):
        code, error = self.call_failing("calibrate", "--out", self.path("missing/dir/report.json"))
        self.assertEqual(code, IO_ERROR)
        self.assertEqual(error["error"], "io_error")


class LoggingTests(CommandTestCase):

    @skipIf(os.getenv("SIM_LOG_LEVEL"), "log level set from the environment")
    def test_info_is_off_by_default(self):
        self.assertFalse(logging.getLogger("apps").isEnabledFor(logging.INFO))

    def test_verbosity_applies_to_one_command(self):
        app_logger = logging.getLogger("apps")
        before = app_logger.level
        self.call("pattern", "--oracle", "00", "--verbosity", "2")
        self.assertEqual(app_logger.level, before)
        self.call_failing("table", "--verbosity", "2")
        self.assertEqual(app_logger.level, before)

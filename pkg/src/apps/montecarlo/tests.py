# src/apps/montecarlo/tests.py
import dataclasses
import math

from django.test import SimpleTestCase

from apps.detection.povm import DetectorConfig, detection_probabilities
from apps.inference.betting import DecisionRule, calibrate_visibility, success_probability
from apps.optics.patterns import PatternModel, SlitGeometry
from apps.qubits.exceptions import UnphysicalParameter
from apps.qubits.states import OracleFunction

from .serializers import CountResultSerializer, GameResultSerializer
from .simulation import (
    CountsInconsistent,
    RunConfig,
    calibrate_to_table,
    mean_over_seeds,
    play_single_shot_game,
    simulate_coincidences,
    simulate_table,
    substream,
    trial_stream,
)

# Coincidences in 1000 s for f = 00, 01, 10, 11 with the 100 um detector.
MEASURED_TABLE = {"00": 5218, "01": 450, "10": 427, "11": 5399}
DURATION = 1000.0


def bench_geometry():
    return SlitGeometry.from_crossing(100e-6, 250e-6, 650e-9, 0.11e-3)


class SubstreamTests(SimpleTestCase):

    def test_same_key_same_draws(self):
        self.assertEqual(substream(7, 0, 3).integers(0, 2 ** 32, 5).tolist(),
                         substream(7, 0, 3).integers(0, 2 ** 32, 5).tolist())

    def test_keys_are_independent(self):
        self.assertNotEqual(substream(7, 0, 3).integers(0, 2 ** 32, 5).tolist(),
                            substream(7, 0, 2).integers(0, 2 ** 32, 5).tolist())

    def test_trial_draws_do_not_depend_on_where_a_block_starts(self):
        whole = trial_stream(7, 1, 0).random((10, 4))
        tail = trial_stream(7, 1, 6).random((4, 4))
        self.assertEqual(whole[6:].tolist(), tail.tolist())

    def test_seed_range(self):
        substream(2 ** 64 - 1, 0)
        for seed in (-1, 2 ** 64, 1.5, None, True):
            with self.assertRaises(UnphysicalParameter):
                substream(seed, 0)


class TableCalibrationTests(SimpleTestCase):
    """Inverting the constant/balanced counts into V_t and the herald rate."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.model = PatternModel(bench_geometry(), 1.0)
        cls.detector = DetectorConfig(0.0, 100e-6, 1.0)
        cls.visibility, cls.herald_rate = calibrate_to_table(5218, 450, DURATION, cls.detector, cls.model)

    def test_ratio_is_reproduced(self):
        table = detection_probabilities(self.model.with_visibility(self.visibility), self.detector)
        self.assertAlmostEqual(table.p_b / table.p_c, 450 / 5218, delta=1e-6)
        self.assertAlmostEqual(self.herald_rate * DURATION * table.p_c, 5218, delta=1e-6)

    def test_calibrated_values(self):
        self.assertAlmostEqual(self.visibility, 0.917, delta=0.005)
        self.assertAlmostEqual(self.herald_rate, 31.2, delta=0.2)

    def test_equal_counts_mean_no_fringes(self):
        visibility, _ = calibrate_to_table(1000, 1000, DURATION, self.detector, self.model)
        self.assertEqual(visibility, 0.0)

    def test_ideal_ratio_means_full_visibility(self):
        table = detection_probabilities(self.model, self.detector)
        counts_constant = 10 ** 6
        counts_balanced = table.p_b / table.p_c * counts_constant
        visibility, _ = calibrate_to_table(counts_constant, counts_balanced, DURATION, self.detector, self.model)
        self.assertEqual(visibility, 1.0)

    def test_impossible_contrast(self):
        with self.assertRaises(CountsInconsistent):
            calibrate_to_table(5218, 10, DURATION, self.detector, self.model)
        with self.assertRaises(CountsInconsistent):
            calibrate_to_table(450, 5218, DURATION, self.detector, self.model)
        with self.assertRaises(CountsInconsistent):
            calibrate_to_table(0, 0, DURATION, self.detector, self.model)


class CoincidenceTests(SimpleTestCase):
    """Poisson coincidence runs."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        model = PatternModel(bench_geometry(), 1.0)
        detector = DetectorConfig(0.0, 100e-6, 1.0)
        visibility, herald_rate = calibrate_to_table(5218, 450, DURATION, detector, model)
        cls.config = RunConfig(
            OracleFunction(0, 0), model.with_visibility(visibility), detector, herald_rate, DURATION, seed=1
        )

    def test_same_seed_same_counts(self):
        self.assertEqual(simulate_coincidences(self.config), simulate_coincidences(self.config))

    def test_closed_detector_counts_nothing(self):
        closed = dataclasses.replace(self.config, detector=DetectorConfig(0.0, 0.0, 1.0))
        result = simulate_coincidences(closed)
        self.assertEqual(result.coincidences, 0)
        self.assertEqual(result.expected, 0.0)

    def test_rows_do_not_depend_on_order(self):
        rows = simulate_table(self.config)
        for row in rows:
            single = simulate_coincidences(dataclasses.replace(self.config, f=OracleFunction.from_label(row.oracle)))
            self.assertEqual(single, row)

    def test_measured_table_within_three_sigma(self):
        seeds = range(100)
        means = {}
        for label, measured in MEASURED_TABLE.items():
            cfg = dataclasses.replace(self.config, f=OracleFunction.from_label(label))
            mean, sigma = mean_over_seeds(cfg, seeds)
            combined = math.sqrt(sigma ** 2 + measured)
            with self.subTest(f=label):
                self.assertLess(abs(mean - measured), 3 * combined)
            means[label] = mean
        ratio = means["01"] / means["00"]
        self.assertAlmostEqual(ratio, 450 / 5218, delta=0.1 * 450 / 5218)

    def test_poisson_mean(self):
        cfg = dataclasses.replace(self.config, f=OracleFunction(0, 1))
        mean, sigma = mean_over_seeds(cfg, range(1000, 1100))
        expected = simulate_coincidences(cfg).expected
        self.assertLess(abs(mean - expected), 3 * sigma)

    def test_std_error_is_poissonian(self):
        result = simulate_coincidences(self.config)
        self.assertAlmostEqual(result.expected, 5218, delta=1e-3)
        self.assertAlmostEqual(result.std_error, math.sqrt(result.expected), delta=1e-12)

    def test_invalid_run(self):
        with self.assertRaises(UnphysicalParameter):
            dataclasses.replace(self.config, duration=0.0)
        with self.assertRaises(UnphysicalParameter):
            dataclasses.replace(self.config, herald_rate=-1.0)

    def test_serializer(self):
        data = CountResultSerializer(simulate_coincidences(self.config)).data
        self.assertEqual(set(data), {"f", "coincidences", "expected", "std_error", "seed"})
        self.assertEqual(data["f"], "00")
        self.assertEqual(data["seed"], 1)


class SingleShotGameTests(SimpleTestCase):
    """Empirical betting frequencies against the analytic P(S)."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.model = PatternModel(cls.geometry, 1.0)
        cls.slit = DetectorConfig(0.0, 100e-6, 1.0)
        cls.calibrated = calibrate_visibility(cls.model, cls.slit, 0.55)

    def assertWithinBinomial(self, result, expected):
        sigma = math.sqrt(expected * (1.0 - expected) / result.trials)
        self.assertLessEqual(abs(result.frequency - expected), 3 * sigma)

    def test_blind_detector(self):
        result = play_single_shot_game(100_000, self.model, self.slit, 0.0, seed=3)
        self.assertWithinBinomial(result, 0.5)

    def test_quoted_success_probability(self):
        result = play_single_shot_game(10 ** 6, self.model.with_visibility(self.calibrated), self.slit, 1.0, seed=4)
        self.assertAlmostEqual(result.analytic, 0.55, delta=1e-6)
        self.assertLessEqual(abs(result.frequency - 0.55), 0.0015)

    def test_parameter_sets_match_analytic(self):
        cases = [
            (self.model.with_visibility(self.calibrated), self.slit, 1.0, DecisionRule.DETECT_CONSTANT),
            (self.model, DetectorConfig(0.0, 220e-6), 1.0, DecisionRule.DETECT_CONSTANT),
            (self.model, self.slit, 0.5, DecisionRule.DETECT_CONSTANT),
            (self.model.with_visibility(0.3), DetectorConfig(0.0, 10e-6), 1.0, DecisionRule.DETECT_CONSTANT),
            (self.model, DetectorConfig(0.0, 600e-6), 1.0, DecisionRule.DETECT_BALANCED),
        ]
        for index, (model, detector, eta, rule) in enumerate(cases):
            with self.subTest(case=index):
                result = play_single_shot_game(10 ** 6, model, detector, eta, seed=100 + index, rule=rule)
                table = detection_probabilities(model, detector)
                self.assertEqual(result.analytic, success_probability(table, eta, rule))
                self.assertWithinBinomial(result, result.analytic)

    def test_convergence_with_trials(self):
        model = self.model.with_visibility(self.calibrated)
        for trials in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
            with self.subTest(trials=trials):
                self.assertWithinBinomial(play_single_shot_game(trials, model, self.slit, 1.0, seed=9), 0.55)

    def test_worker_count_does_not_change_results(self):
        serial = play_single_shot_game(200_003, self.model, self.slit, 1.0, seed=5, block_size=4096, workers=1)
        pooled = play_single_shot_game(200_003, self.model, self.slit, 1.0, seed=5, block_size=4096, workers=4)
        self.assertEqual(serial, pooled)

    def test_block_size_does_not_change_results(self):
        results = {
            play_single_shot_game(20_001, self.model, self.slit, 1.0, seed=5, block_size=size, workers=2)
            for size in (1, 7, 4096, 10 ** 6)
        }
        self.assertEqual(len(results), 1)

    def test_trials_must_be_positive(self):
        with self.assertRaises(UnphysicalParameter):
            play_single_shot_game(0, self.model, self.slit, 1.0, seed=1)

    def test_serializer(self):
        result = play_single_shot_game(1000, self.model, self.slit, 1.0, seed=6)
        data = GameResultSerializer(result).data
        self.assertEqual(data["trials"], 1000)
        self.assertAlmostEqual(data["frequency"], result.successes / 1000)

# src/apps/inference/tests.py
import io
import math

import numpy as np
from django.test import SimpleTestCase

from apps.detection.povm import DetectorConfig, ProbabilityTable, detection_probabilities
from apps.optics.patterns import PatternModel, SlitGeometry
from apps.qubits.exceptions import UnphysicalParameter
from apps.qubits.states import ALL_ORACLES

from .betting import (
    DecisionRule,
    NoDetections,
    TargetUnattainable,
    bayes_posteriors,
    calibrate_visibility,
    decide,
    evaluate_bet,
    resolved_success_probability,
    scan_detector_width,
    success_probability,
)
from .serializers import BetOutcomeSerializer, ScanSummarySerializer, write_scan_curve


def bench_geometry():
    return SlitGeometry.from_crossing(100e-6, 250e-6, 650e-9, 0.11e-3)


def random_symmetric_table(rng):
    p_c, p_b = rng.uniform(0.0, 1.0, size=2)
    return ProbabilityTable(p_c, p_b, p_b, p_c)


class SuccessProbabilityTests(SimpleTestCase):
    """Betting formulas on explicit tables."""

    def test_blind_detector_is_a_coin_flip(self):
        table = ProbabilityTable(0.2, 0.01, 0.01, 0.2)
        self.assertEqual(success_probability(table, 0.0), 0.5)

    def test_general_formula_matches_symmetric_form(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            table = random_symmetric_table(rng)
            eta = rng.uniform()
            expected = 0.5 * (1.0 + eta * (table.p_c - table.p_b))
            self.assertAlmostEqual(success_probability(table, eta), expected, delta=1e-12)

    def test_affine_in_eta(self):
        table = ProbabilityTable(0.3, 0.05, 0.07, 0.28)
        values = [success_probability(table, eta) for eta in (0.0, 0.25, 0.5, 1.0)]
        slope = values[3] - values[0]
        self.assertEqual(values[0], 0.5)
        self.assertAlmostEqual(values[1], 0.5 + 0.25 * slope, delta=1e-12)
        self.assertAlmostEqual(values[2], 0.5 + 0.5 * slope, delta=1e-12)

    def test_opposite_rule_complements(self):
        table = ProbabilityTable(0.01, 0.2, 0.2, 0.01)
        constant = success_probability(table, 1.0, DecisionRule.DETECT_CONSTANT)
        balanced = success_probability(table, 1.0, DecisionRule.DETECT_BALANCED)
        self.assertAlmostEqual(constant + balanced, 1.0, delta=1e-15)
        self.assertGreater(balanced, 0.5)
        self.assertIs(evaluate_bet(table, 1.0).decision_rule, DecisionRule.DETECT_BALANCED)

    def test_enumeration_over_events(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            p = rng.uniform(0.0, 1.0, size=4)
            table = ProbabilityTable(*p)
            eta = rng.uniform()
            for rule in DecisionRule:
                total = 0.0
                for f in ALL_ORACLES:
                    clicked = eta * table.for_oracle(f)
                    for detected, weight in ((True, clicked), (False, 1.0 - clicked)):
                        if decide(detected, rule) == f.kind:
                            total += 0.25 * weight
                self.assertAlmostEqual(total, success_probability(table, eta, rule), delta=1e-12)

    def test_posteriors_reassemble_success(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            table = random_symmetric_table(rng)
            eta = rng.uniform()
            given_detection, given_miss = bayes_posteriors(table, eta)
            p_detect = 0.5 * eta * (table.p_c + table.p_b)
            total = p_detect * given_detection + (1.0 - p_detect) * given_miss
            self.assertAlmostEqual(total, success_probability(table, eta), delta=1e-12)

    def test_posterior_edge_cases(self):
        self.assertEqual(bayes_posteriors(ProbabilityTable(0.3, 0.3, 0.3, 0.3), 1.0)[0], 0.5)
        self.assertEqual(bayes_posteriors(ProbabilityTable(0.3, 0.1, 0.1, 0.3), 0.0)[1], 0.5)
        self.assertEqual(bayes_posteriors(ProbabilityTable(1.0, 1.0, 1.0, 1.0), 1.0)[1], 0.5)
        with self.assertRaises(NoDetections):
            bayes_posteriors(ProbabilityTable(0.0, 0.0, 0.0, 0.0), 1.0)

    def test_eta_range(self):
        with self.assertRaises(UnphysicalParameter):
            success_probability(ProbabilityTable(0.2, 0.1, 0.1, 0.2), 1.2)

    def test_decide(self):
        self.assertEqual(decide(True), "constant")
        self.assertEqual(decide(False), "balanced")
        self.assertEqual(decide(True, DecisionRule.DETECT_BALANCED), "balanced")

    def test_outcome_serializer(self):
        outcome = evaluate_bet(ProbabilityTable(0.2, 0.01, 0.01, 0.2), 1.0)
        data = BetOutcomeSerializer(outcome).data
        self.assertEqual(data["decision_rule"], "constant")
        self.assertAlmostEqual(data["p_success"], 0.595)


class DetectorBettingTests(SimpleTestCase):
    """Betting with the double-slit detector model."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.model = PatternModel(cls.geometry, 1.0)

    def test_whole_plane_recovers_fifty_fifty(self):
        table = detection_probabilities(self.model, DetectorConfig(0.0, math.inf))
        self.assertAlmostEqual(success_probability(table, 1.0), 0.5, delta=1e-6)

    def test_narrow_detector_posteriors(self):
        table = detection_probabilities(self.model, DetectorConfig(0.0, 10e-6))
        given_detection, given_miss = bayes_posteriors(table, 1.0)
        self.assertGreater(given_detection, 0.95)
        self.assertGreaterEqual(given_miss, 0.5)
        self.assertLessEqual(given_miss, 0.55)

    def test_ideal_detector_slit(self):
        table = detection_probabilities(self.model, DetectorConfig(0.0, 100e-6))
        self.assertAlmostEqual(success_probability(table, 1.0), 0.5832, delta=1e-3)

    def test_calibrated_visibility(self):
        det = DetectorConfig(0.0, 100e-6, 1.0)
        visibility = calibrate_visibility(self.model, det, 0.55)
        self.assertAlmostEqual(visibility, 0.601, delta=0.005)
        table = detection_probabilities(self.model.with_visibility(visibility), det)
        self.assertAlmostEqual(success_probability(table, 1.0), 0.55, delta=1e-6)

    def test_calibration_endpoints(self):
        det = DetectorConfig(0.0, 100e-6, 1.0)
        ideal = success_probability(detection_probabilities(self.model, det), 1.0)
        self.assertEqual(calibrate_visibility(self.model, det, 0.5), 0.0)
        self.assertEqual(calibrate_visibility(self.model, det, ideal), 1.0)

    def test_unreachable_targets(self):
        det = DetectorConfig(0.0, 100e-6, 1.0)
        with self.assertRaises(TargetUnattainable):
            calibrate_visibility(self.model, det, 0.7)
        with self.assertRaises(TargetUnattainable):
            calibrate_visibility(self.model, det, 0.45)

    def test_calibration_uses_detector_efficiency(self):
        det = DetectorConfig(0.0, 100e-6, 0.5)
        visibility = calibrate_visibility(self.model, det, 0.53)
        table = detection_probabilities(self.model.with_visibility(visibility), det.with_efficiency(1.0))
        self.assertAlmostEqual(success_probability(table, 0.5), 0.53, delta=1e-6)


class WidthScanTests(SimpleTestCase):
    """Success probability against detector width."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.model = PatternModel(cls.geometry, 1.0)
        cls.ideal = scan_detector_width(cls.model, 1.0, 5e-6, 1000e-6, 5e-6)
        visibility = calibrate_visibility(cls.model, DetectorConfig(0.0, 100e-6), 0.55)
        cls.calibrated = scan_detector_width(cls.model.with_visibility(visibility), 1.0, 5e-6, 1000e-6, 5e-6)

    def test_ideal_optimum_spans_the_crossings(self):
        self.assertEqual(len(self.ideal.widths), 200)
        self.assertAlmostEqual(self.ideal.optimal_width, 220e-6, delta=1e-12)
        self.assertAlmostEqual(self.ideal.optimal_p, 0.6265, delta=2e-3)

    def test_calibrated_optimum(self):
        self.assertAlmostEqual(self.calibrated.optimal_p, 0.58, delta=0.01)
        self.assertGreaterEqual(self.calibrated.optimal_width, 200e-6)
        self.assertLessEqual(self.calibrated.optimal_width, 300e-6)

    def test_curve_never_below_fifty_fifty(self):
        self.assertGreaterEqual(min(self.calibrated.p_success_curve), 0.5)
        self.assertEqual(max(self.calibrated.p_success_curve), self.calibrated.optimal_p)

    def test_rule_inverts_past_the_first_dark_fringe(self):
        self.assertIs(self.ideal.rules[0], DecisionRule.DETECT_CONSTANT)
        self.assertIn(DecisionRule.DETECT_BALANCED, self.ideal.rules)

    def test_blind_detector_scan_is_flat(self):
        result = scan_detector_width(self.model, 0.0, 50e-6, 300e-6, 50e-6)
        self.assertEqual(set(result.p_success_curve), {0.5})
        self.assertEqual(result.optimal_width, 50e-6)

    def test_invalid_range(self):
        with self.assertRaises(UnphysicalParameter):
            scan_detector_width(self.model, 1.0, 300e-6, 100e-6, 5e-6)

    def test_csv_and_summary(self):
        buffer = io.StringIO()
        write_scan_curve(self.ideal, buffer)
        lines = buffer.getvalue().splitlines()
        self.assertEqual(lines[0], "width_m,p_success")
        self.assertEqual(len(lines), 201)
        summary = ScanSummarySerializer(self.ideal).data
        self.assertEqual(summary["optimal_width_m"], self.ideal.optimal_width)
        self.assertEqual(summary["points"], 200)


class ResolvedDetectorTests(SimpleTestCase):
    """Position-resolving camera."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.model = PatternModel(bench_geometry(), 1.0)

    def test_whole_plane_value(self):
        self.assertAlmostEqual(resolved_success_probability(self.model, 1.0), 0.5 + 1.0 / math.pi, delta=1e-15)
        self.assertEqual(resolved_success_probability(self.model, 0.0), 0.5)

    def test_large_window_approaches_whole_plane(self):
        value = resolved_success_probability(self.model, 1.0, -20e-3, 20e-3)
        self.assertAlmostEqual(value, 0.5 + 1.0 / math.pi, delta=0.01)

    def test_camera_beats_single_detector(self):
        table = detection_probabilities(self.model, DetectorConfig(0.0, 300e-6))
        binary = evaluate_bet(table, 1.0).p_success
        self.assertGreater(resolved_success_probability(self.model, 1.0, -150e-6, 150e-6), binary)

    def test_no_fringes_no_advantage(self):
        flat = self.model.with_visibility(0.0)
        self.assertAlmostEqual(resolved_success_probability(flat, 1.0, -1e-3, 1e-3), 0.5, delta=1e-8)

    def test_half_open_window_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            resolved_success_probability(self.model, 1.0, 0.0, math.inf)

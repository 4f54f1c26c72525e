# src/apps/detection/tests.py
import math

import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import quad

from apps.optics.patterns import PatternModel, SlitGeometry, fourier_intensity
from apps.optics.quadrature import adaptive_simpson
from apps.qubits.exceptions import UnphysicalParameter
from apps.qubits.states import MINUS, PLUS, ZERO, MixedState, QubitState

from .povm import (
    DetectorConfig,
    PovmElement,
    ProbabilityTable,
    detection_probabilities,
    detector_for_state,
    povm_element,
    probability_between,
    window_probability,
)
from .serializers import ProbabilityTableSerializer


def bench_geometry():
    return SlitGeometry.from_crossing(100e-6, 250e-6, 650e-9, 0.11e-3)


def random_density(rng):
    """A random mixture of two random pure states."""
    matrices = []
    for _ in range(2):
        raw = rng.normal(size=2) + 1j * rng.normal(size=2)
        matrices.append(QubitState.from_amplitudes(raw[0], raw[1]).density().matrix)
    weight = rng.uniform()
    return MixedState.from_matrix(weight * matrices[0] + (1 - weight) * matrices[1])


class DetectorConfigTests(SimpleTestCase):

    def test_negative_width_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            DetectorConfig(0.0, -1e-6, 1.0)

    def test_efficiency_range(self):
        with self.assertRaises(UnphysicalParameter):
            DetectorConfig(0.0, 100e-6, 1.5)
        with self.assertRaises(UnphysicalParameter):
            DetectorConfig(0.0, 100e-6, -0.1)

    def test_bounds(self):
        self.assertEqual(DetectorConfig(1e-4, 2e-4).bounds, (0.0, 2e-4))
        self.assertEqual(DetectorConfig(0.0, math.inf).bounds, (-math.inf, math.inf))


class PovmElementTests(SimpleTestCase):
    """The detector operator reproduces every window probability."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()

    def test_trace_rule_on_random_states_and_windows(self):
        rng = np.random.default_rng(2024)
        for case in range(100):
            rho = random_density(rng)
            model = PatternModel(self.geometry, float(rng.uniform()))
            det = DetectorConfig(
                float(rng.uniform(-1e-3, 1e-3)),
                float(rng.uniform(1e-6, 1e-3)),
                float(rng.uniform()),
            )
            with self.subTest(case=case):
                lo, hi = det.bounds
                direct = det.efficiency * adaptive_simpson(lambda x: fourier_intensity(rho, model, x), lo, hi)
                self.assertAlmostEqual(window_probability(rho, model, det), direct, delta=1e-8)
                self.assertAlmostEqual(povm_element(model, det).probability(rho), direct, delta=1e-8)

    def test_element_is_positive_and_bounded(self):
        for width in (1e-6, 100e-6, 1e-3, math.inf):
            element = povm_element(PatternModel(self.geometry, 1.0), DetectorConfig(0.2e-3, width))
            low, high = element.eigenvalues()
            self.assertGreaterEqual(low, -1e-12)
            self.assertLessEqual(high, 1.0 + 1e-9)

    def test_whole_plane_is_identity(self):
        element = povm_element(PatternModel(self.geometry, 1.0), DetectorConfig(0.0, math.inf))
        self.assertTrue(np.allclose(element.matrix, np.eye(2), atol=1e-8))

    def test_zero_width_collects_nothing(self):
        det = DetectorConfig(0.0, 0.0)
        model = PatternModel(self.geometry, 1.0)
        self.assertEqual(window_probability(PLUS, model, det), 0.0)
        self.assertTrue(np.array_equal(povm_element(model, det).matrix, np.zeros((2, 2))))

    def test_narrow_detector_approaches_plus_projector(self):
        model = PatternModel(self.geometry, 1.0)
        ratios = []
        for width in (10e-6, 1e-6, 0.1e-6):
            element = povm_element(model, DetectorConfig(0.0, width))
            ratios.append(abs(element.e01) / element.e00.real)
        self.assertGreater(ratios[0], 1.0 - 1e-3)
        self.assertGreater(ratios[2], 1.0 - 1e-6)
        self.assertLess(ratios[0], ratios[1])
        self.assertLess(ratios[1], ratios[2])

    def test_narrow_detector_samples_the_density(self):
        model = PatternModel(self.geometry, 1.0)
        for width in (10e-6, 1e-6, 0.1e-6):
            probability = window_probability(PLUS, model, DetectorConfig(0.0, width))
            ratio = probability / (width * fourier_intensity(PLUS, model, 0.0))
            self.assertAlmostEqual(ratio, 1.0, delta=1e-3)

    def test_non_hermitian_element_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            PovmElement(0.5, 0.1j, 0.1j, 0.5)


def cosine_tail(gamma, X):
    """Integral of cos(gamma u) / (2 u^2) over [X, inf)."""
    if gamma == 0.0:
        return 1.0 / (2.0 * X)
    return quad(lambda u: 0.5 / u ** 2, X, np.inf, weight="cos", wvar=gamma, epsabs=1e-14)[0]


class WideWindowTests(SimpleTestCase):
    """Detectors reaching far past the central diffraction lobe."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.model = PatternModel(cls.geometry, 1.0)

    def exact_plus_probability(self, width):
        """|+> at V = 1 on [-width/2, width/2]: one minus both tails of s + c."""
        beta = self.geometry.beta
        X = self.geometry.to_u(width / 2.0)
        s_tail = (cosine_tail(0.0, X) - cosine_tail(2.0, X)) / math.pi
        c_tail = (
            cosine_tail(beta, X) - 0.5 * cosine_tail(beta + 2.0, X) - 0.5 * cosine_tail(abs(beta - 2.0), X)
        ) / math.pi
        c_full = max(0.0, 1.0 - beta / 2.0)
        return (1.0 - 2.0 * s_tail) + (c_full - 2.0 * c_tail)

    def test_wide_windows_match_closed_form(self):
        for width in (0.2, 1.0, 3.0):
            with self.subTest(width=width):
                det = DetectorConfig(0.0, width)
                exact = self.exact_plus_probability(width)
                self.assertAlmostEqual(povm_element(self.model, det).probability(PLUS), exact, delta=1e-9)
                self.assertAlmostEqual(window_probability(PLUS, self.model, det), exact, delta=1e-9)

    def test_wide_windows_keep_a_valid_table(self):
        previous = 0.0
        for width in (0.2, 1.0, 3.0, 30.0):
            with self.subTest(width=width):
                table = detection_probabilities(self.model, DetectorConfig(0.0, width))
                self.assertLessEqual(table.p_c, 1.0 + 1e-9)
                self.assertGreaterEqual(table.p_c, previous)
                previous = table.p_c


class DetectionProbabilityTests(SimpleTestCase):
    """p_ij for the four oracles."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.model = PatternModel(cls.geometry, 1.0)

    def test_detector_slit_width(self):
        table = detection_probabilities(self.model, DetectorConfig(0.0, 100e-6))
        self.assertAlmostEqual(table.p_c, 0.175, delta=0.002)
        self.assertAlmostEqual(table.p_b, 0.008, delta=0.001)
        self.assertAlmostEqual(table.p_c - table.p_b, 0.1664, delta=5e-4)

    def test_constant_and_balanced_pairs_are_equal(self):
        table = detection_probabilities(self.model, DetectorConfig(0.0, 100e-6))
        self.assertEqual(table.p00, table.p11)
        self.assertEqual(table.p01, table.p10)
        self.assertEqual(table.p_c, table.p00)

    def test_no_visibility_no_information(self):
        table = detection_probabilities(self.model.with_visibility(0.0), DetectorConfig(0.0, 100e-6))
        self.assertAlmostEqual(table.p_c, table.p_b, delta=1e-15)

    def test_probabilities_are_linear_in_efficiency(self):
        full = detection_probabilities(self.model, DetectorConfig(0.0, 100e-6, 1.0))
        half = detection_probabilities(self.model, DetectorConfig(0.0, 100e-6, 0.5))
        blind = detection_probabilities(self.model, DetectorConfig(0.0, 100e-6, 0.0))
        self.assertAlmostEqual(half.p_c, 0.5 * full.p_c, delta=1e-12)
        self.assertAlmostEqual(half.p_b, 0.5 * full.p_b, delta=1e-12)
        self.assertEqual((blind.p_c, blind.p_b), (0.0, 0.0))

    def test_wider_detectors_collect_more(self):
        previous = 0.0
        for width in (10e-6, 50e-6, 100e-6, 400e-6, 1e-3, math.inf):
            p_b = detection_probabilities(self.model, DetectorConfig(0.0, width)).p_b
            self.assertGreaterEqual(p_b, previous)
            previous = p_b

    def test_whole_plane_detects_every_photon(self):
        table = detection_probabilities(self.model, DetectorConfig(0.0, math.inf, 0.8))
        for value in (table.p00, table.p01, table.p10, table.p11):
            self.assertAlmostEqual(value, 0.8, delta=1e-8)

    def test_window_and_complement_cover_the_plane(self):
        rho = random_density(np.random.default_rng(5))
        det = DetectorConfig(30e-6, 180e-6, 0.9)
        lo, hi = det.bounds
        inside = window_probability(rho, self.model, det)
        outside = probability_between(rho, self.model, -math.inf, lo, 0.9) + probability_between(
            rho, self.model, hi, math.inf, 0.9
        )
        self.assertAlmostEqual(inside + outside, 0.9, delta=1e-8)

    def test_image_population_states_ignore_fringes(self):
        det = DetectorConfig(0.07e-3, 100e-6)
        self.assertAlmostEqual(
            window_probability(ZERO, self.model, det),
            window_probability(ZERO, self.model.with_visibility(0.3), det),
            delta=1e-12,
        )

    def test_minus_detector_inverts_the_table(self):
        det = detector_for_state(MINUS, self.geometry, 100e-6)
        self.assertAlmostEqual(det.center, 220e-6, delta=1e-9)
        table = detection_probabilities(self.model, det)
        self.assertGreater(table.p_b, table.p_c)

    def test_detector_for_plus_is_centred(self):
        self.assertEqual(detector_for_state(PLUS, self.geometry, 50e-6).center, 0.0)

    def test_detector_for_pole_state_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            detector_for_state(ZERO, self.geometry, 50e-6)

    def test_table_rejects_non_probabilities(self):
        with self.assertRaises(UnphysicalParameter):
            ProbabilityTable(0.1, 0.2, 1.3, 0.1)

    def test_table_serializer(self):
        data = ProbabilityTableSerializer(ProbabilityTable(0.2, 0.01, 0.01, 0.2)).data
        self.assertEqual(set(data), {"p00", "p01", "p10", "p11", "p_c", "p_b"})
        self.assertAlmostEqual(data["p_c"], 0.2)
        self.assertAlmostEqual(data["p_b"], 0.01)

# src/apps/biphoton/tests.py
import math

import numpy as np
from django.test import SimpleTestCase

from apps.optics.patterns import SlitGeometry
from apps.optics.quadrature import adaptive_simpson
from apps.qubits.exceptions import UnphysicalParameter
from apps.qubits.states import ALL_ORACLES, MINUS, PLUS, OracleFunction, QubitState

from .heralding import (
    BiphotonState,
    HeraldWindow,
    NoHeralds,
    conditional_signal_state,
    herald_joint_state,
    herald_phase,
    herald_report,
    heralded_mixed_state,
    verify_commutation,
)
from .serializers import HeraldReportSerializer

CROSSING = 0.11e-3


def bench_geometry():
    return SlitGeometry.from_crossing(100e-6, 250e-6, 650e-9, CROSSING)


class HeraldPhaseTests(SimpleTestCase):
    """Idler position to prepared signal phase."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()

    def test_centre_prepares_plus(self):
        self.assertEqual(herald_phase(0.0, self.geometry), 0.0)
        self.assertTrue(conditional_signal_state(0.0, self.geometry).equals_up_to_phase(PLUS))

    def test_crossing_point_gives_quarter_turn(self):
        self.assertAlmostEqual(herald_phase(CROSSING, self.geometry), math.pi / 2, delta=1e-12)
        state = conditional_signal_state(CROSSING, self.geometry)
        target = QubitState(1 / math.sqrt(2), 1j / math.sqrt(2))
        self.assertTrue(state.equals_up_to_phase(target, tol=1e-12))

    def test_half_fringe_prepares_minus(self):
        x = self.geometry.fringe_period / 2
        self.assertTrue(conditional_signal_state(x, self.geometry).equals_up_to_phase(MINUS, tol=1e-12))

    def test_phase_is_odd_and_linear(self):
        for x in (13e-6, 0.2e-3, 1.7e-3):
            self.assertAlmostEqual(
                herald_phase(-x, self.geometry), -herald_phase(x, self.geometry), delta=1e-12
            )
        self.assertAlmostEqual(
            herald_phase(3e-4, self.geometry), 3 * herald_phase(1e-4, self.geometry), delta=1e-12
        )

    def test_populations_are_fixed(self):
        for x in np.linspace(-2e-3, 2e-3, 17):
            state = conditional_signal_state(float(x), self.geometry)
            self.assertAlmostEqual(abs(state.alpha), 1 / math.sqrt(2), delta=1e-12)
            self.assertAlmostEqual(abs(state.beta), 1 / math.sqrt(2), delta=1e-12)


class HeraldedMixedStateTests(SimpleTestCase):
    """Finite idler slits prepare mixtures."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()

    def _expected_coherence(self, centre, width):
        g = self.geometry
        lo, hi = centre - width / 2, centre + width / 2
        weight = adaptive_simpson(g.envelope, lo, hi)
        real = adaptive_simpson(lambda x: g.envelope(x) * math.cos(g.relative_phase(x)), lo, hi)
        imag = adaptive_simpson(lambda x: -g.envelope(x) * math.sin(g.relative_phase(x)), lo, hi)
        return 0.5 * complex(real, imag) / weight

    def test_point_herald_is_pure(self):
        rho = heralded_mixed_state(HeraldWindow(0.0, 0.0), self.geometry)
        self.assertAlmostEqual(rho.purity(), 1.0, delta=1e-12)
        self.assertTrue(rho.is_close(PLUS.density(), 1e-12))

    def test_detector_slit_width(self):
        rho = heralded_mixed_state(HeraldWindow(0.0, 100e-6), self.geometry)
        expected = self._expected_coherence(0.0, 100e-6)
        self.assertAlmostEqual(abs(rho.rho01 - expected), 0.0, delta=1e-9)
        # phi reaches +-0.714 rad at the slit edges, so about 8% of the coherence is lost
        self.assertGreater(rho.purity(), 0.9)
        self.assertLess(rho.purity(), 0.95)

    def test_off_centre_window(self):
        rho = heralded_mixed_state(HeraldWindow(0.15e-3, 60e-6), self.geometry)
        expected = self._expected_coherence(0.15e-3, 60e-6)
        self.assertAlmostEqual(abs(rho.rho01 - expected), 0.0, delta=1e-9)

    def test_populations_stay_balanced(self):
        for width in (10e-6, 100e-6, 700e-6, math.inf):
            rho = heralded_mixed_state(HeraldWindow(0.05e-3, width), self.geometry)
            self.assertAlmostEqual(rho.rho00.real, 0.5, delta=1e-9)
            self.assertAlmostEqual(rho.rho11.real, 0.5, delta=1e-9)

    def test_purity_decreases_within_one_fringe(self):
        widths = [0.0, 20e-6, 50e-6, 100e-6, 200e-6, 300e-6, 400e-6]
        purities = [
            heralded_mixed_state(HeraldWindow(0.0, w), self.geometry).purity() for w in widths
        ]
        for narrower, wider in zip(purities, purities[1:]):
            self.assertLess(wider, narrower)

    def test_whole_plane_is_mixed(self):
        rho = heralded_mixed_state(HeraldWindow(0.0, math.inf), self.geometry)
        self.assertLess(abs(rho.rho01), rho.rho00.real)
        self.assertAlmostEqual(rho.purity(), 0.5, delta=1e-8)

    def test_dark_point_herald(self):
        first_zero = self.geometry.wavelength * self.geometry.focal_length / self.geometry.slit_width
        with self.assertRaises(NoHeralds):
            heralded_mixed_state(HeraldWindow(first_zero, 0.0), self.geometry)

    def test_negative_width_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            HeraldWindow(0.0, -1e-6)

    def test_joint_heralding_matches_mixture(self):
        window = HeraldWindow(-0.07e-3, 130e-6)
        joint = herald_joint_state(BiphotonState().joint_vector(), window, self.geometry)
        self.assertTrue(joint.is_close(heralded_mixed_state(window, self.geometry), 1e-12))


class CommutationTests(SimpleTestCase):
    """Oracle and idler projection commute."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()

    def test_balanced_oracle_point_herald(self):
        self.assertTrue(verify_commutation(OracleFunction(0, 1), HeraldWindow(0.0, 0.0), self.geometry))

    def test_identity_oracle(self):
        self.assertTrue(verify_commutation(OracleFunction(0, 0), HeraldWindow(0.3e-3, 250e-6), self.geometry))

    def test_detector_slit(self):
        self.assertTrue(verify_commutation(OracleFunction(1, 0), HeraldWindow(0.0, 100e-6), self.geometry))

    def test_oracle_by_window_grid(self):
        centres = (-0.4e-3, -0.11e-3, 0.0, 0.11e-3, 0.5e-3)
        widths = (0.0, 40e-6, 100e-6, 600e-6)
        windows = [HeraldWindow(c, w) for c in centres for w in widths]
        self.assertGreaterEqual(len(windows), 20)
        for f in ALL_ORACLES:
            for window in windows:
                with self.subTest(f=f.label, window=window):
                    self.assertTrue(verify_commutation(f, window, self.geometry))


class HeraldReportTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.report = herald_report(HeraldWindow(0.0, 100e-6), cls.geometry)

    def test_report_collects_the_window_state(self):
        self.assertEqual(self.report.herald_phase, 0.0)
        self.assertTrue(self.report.conditional_state.equals_up_to_phase(PLUS))
        self.assertTrue(self.report.heralded_state.is_close(
            heralded_mixed_state(HeraldWindow(0.0, 100e-6), self.geometry), 0.0
        ))
        self.assertEqual(set(self.report.commutes), {f.label for f in ALL_ORACLES})
        self.assertTrue(all(self.report.commutes.values()))

    def test_serializer(self):
        data = HeraldReportSerializer(self.report).data
        self.assertEqual(data["window_width"], 100e-6)
        self.assertEqual(data["conditional_state"]["beta"][1], 0.0)
        self.assertEqual(data["heralded_state"]["rho00"], 0.5)
        self.assertAlmostEqual(data["heralded_state"]["purity"], self.report.heralded_state.purity(), delta=1e-15)
        self.assertGreater(data["heralded_state"]["purity"], 0.9)
        self.assertLess(data["heralded_state"]["purity"], 0.95)

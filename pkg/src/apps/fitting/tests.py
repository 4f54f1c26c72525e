# src/apps/fitting/tests.py
import math

import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import trapezoid

from apps.optics.patterns import IntensitySample, PatternModel, SlitGeometry, sample_grid, sample_pattern
from apps.qubits.exceptions import UnphysicalParameter
from apps.qubits.states import PLUS, ZERO, QubitState

from .fits import (
    EmptyPeak,
    NoFringes,
    attenuation_from_areas,
    fit_pattern_pair,
    fringe_model,
    peak_areas,
)
from .serializers import FitResultSerializer, PeakAreasSerializer


def bench_geometry():
    return SlitGeometry.from_crossing(100e-6, 250e-6, 650e-9, 0.11e-3)


def synthetic_pair(g, amplitude, visibility, delta_phi, center=0.0, rng=None, noise=0.0, shift=0.0):
    """Reference and shifted patterns on the -1..1 mm, 40 um grid, optionally with multiplicative noise."""
    xs = sample_grid(-1e-3, 1e-3, 40e-6)
    pair = []
    for phase in (0.0, delta_phi):
        values = fringe_model(g, xs, amplitude, visibility, phase, center)
        if noise:
            values = np.clip(values * (1.0 + noise * rng.normal(size=len(xs))), 0.0, None)
        pair.append([IntensitySample(float(x) + shift, float(v)) for x, v in zip(xs, values)])
    return pair


class FitPatternPairTests(SimpleTestCase):
    """Joint fits of two Fourier-plane patterns."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()

    def test_half_turn_round_trip(self):
        reference, shifted = synthetic_pair(self.geometry, 3.0, 0.9, math.pi)
        result = fit_pattern_pair(reference, shifted, self.geometry)
        self.assertAlmostEqual(result.delta_phi, math.pi, delta=1e-6)
        self.assertAlmostEqual(result.visibility, 0.9, delta=1e-6)
        self.assertAlmostEqual(result.amplitude, 3.0, delta=3e-6)
        self.assertAlmostEqual(result.center_offset, 0.0, delta=1e-10)
        self.assertLess(result.residual_rms, 1e-8)

    def test_parameter_grid_round_trip(self):
        for amplitude in (0.1, 1.7, 10.0):
            for visibility in (0.05, 0.5, 1.0):
                for delta_phi in (0.4, 2.0, 3.25, 5.9):
                    with self.subTest(amplitude=amplitude, visibility=visibility, delta_phi=delta_phi):
                        pair = synthetic_pair(self.geometry, amplitude, visibility, delta_phi)
                        result = fit_pattern_pair(*pair, self.geometry)
                        self.assertAlmostEqual(result.amplitude / amplitude, 1.0, delta=1e-6)
                        self.assertAlmostEqual(result.visibility / visibility, 1.0, delta=1e-6)
                        self.assertAlmostEqual(result.delta_phi / delta_phi, 1.0, delta=1e-6)

    def test_identical_patterns_have_no_relative_phase(self):
        reference, _ = synthetic_pair(self.geometry, 2.0, 0.8, 0.0)
        result = fit_pattern_pair(reference, reference, self.geometry)
        self.assertAlmostEqual(result.delta_phi, 0.0, delta=1e-6)
        self.assertGreaterEqual(result.delta_phi, 0.0)
        self.assertLess(result.delta_phi, 2 * math.pi)

    def test_offset_centre_is_recovered(self):
        pair = synthetic_pair(self.geometry, 1.0, 0.7, 1.1, center=23e-6)
        result = fit_pattern_pair(*pair, self.geometry)
        self.assertAlmostEqual(result.center_offset, 23e-6, delta=1e-10)
        self.assertAlmostEqual(result.delta_phi, 1.1, delta=1e-6)

    def test_noisy_repetitions(self):
        rng = np.random.default_rng(325)
        phases = []
        for _ in range(200):
            pair = synthetic_pair(self.geometry, 1000.0, 0.9, 3.25, rng=rng, noise=0.01)
            phases.append(fit_pattern_pair(*pair, self.geometry).delta_phi)
        self.assertAlmostEqual(float(np.mean(phases)), 3.25, delta=0.01)
        self.assertLessEqual(float(np.std(phases)), 0.03)

    def test_translation_moves_only_the_centre(self):
        rng = np.random.default_rng(7)
        rng_copy = np.random.default_rng(7)
        here = fit_pattern_pair(*synthetic_pair(self.geometry, 5.0, 0.8, 2.5, rng=rng, noise=0.01), self.geometry)
        there = fit_pattern_pair(
            *synthetic_pair(self.geometry, 5.0, 0.8, 2.5, rng=rng_copy, noise=0.01, shift=37e-6), self.geometry
        )
        self.assertAlmostEqual(there.center_offset - here.center_offset, 37e-6, delta=1e-9)
        self.assertAlmostEqual(there.visibility, here.visibility, delta=1e-9)
        self.assertAlmostEqual(there.delta_phi, here.delta_phi, delta=1e-9)
        self.assertAlmostEqual(there.amplitude / here.amplitude, 1.0, delta=1e-9)

    def test_fit_of_simulated_patterns(self):
        model = PatternModel(self.geometry, 0.85)
        heralded = QubitState.equatorial(math.pi / 2)
        reference = sample_pattern(PLUS, model, -1e-3, 1e-3, 40e-6)
        shifted = sample_pattern(heralded, model, -1e-3, 1e-3, 40e-6)
        result = fit_pattern_pair(reference, shifted, self.geometry)
        # |+> at the centre against a state with relative phase pi/2: the fringes move by -pi/2.
        self.assertAlmostEqual(result.delta_phi, 3 * math.pi / 2, delta=1e-6)
        self.assertAlmostEqual(result.visibility, 0.85, delta=1e-6)
        self.assertAlmostEqual(result.amplitude, self.geometry.normalization, delta=1e-3)

    def test_flat_data(self):
        flat = [IntensitySample(float(x), 1.0) for x in sample_grid(-1e-3, 1e-3, 40e-6)]
        with self.assertRaises(NoFringes):
            fit_pattern_pair(flat, flat, self.geometry)

    def test_too_few_samples(self):
        reference, shifted = synthetic_pair(self.geometry, 1.0, 0.9, 1.0)
        with self.assertRaises(UnphysicalParameter):
            fit_pattern_pair(reference[:5], shifted, self.geometry)

    def test_narrow_span(self):
        xs = sample_grid(-100e-6, 100e-6, 10e-6)
        narrow = [IntensitySample(float(x), float(v)) for x, v in zip(xs, fringe_model(self.geometry, xs, 1, 0.5, 0))]
        with self.assertRaises(UnphysicalParameter):
            fit_pattern_pair(narrow, narrow, self.geometry)

    def test_serializer(self):
        result = fit_pattern_pair(*synthetic_pair(self.geometry, 1.0, 0.9, 1.0), self.geometry)
        data = FitResultSerializer(result).data
        self.assertEqual(set(data), {"amplitude", "visibility", "delta_phi", "center_offset", "residual_rms"})


class PeakAreaTests(SimpleTestCase):
    """Image-plane populations from peak areas."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.model = PatternModel(bench_geometry(), 1.0)

    def image(self, state):
        return sample_pattern(state, self.model, -300.5e-6, 300.5e-6, 1e-6, plane="image")

    def test_plus_has_equal_areas(self):
        area_neg, area_pos = peak_areas(self.image(PLUS))
        self.assertAlmostEqual(area_neg, area_pos, delta=1e-12)

    def test_quoted_populations(self):
        state = QubitState(math.sqrt(77 / 149), math.sqrt(72 / 149))
        area_neg, area_pos = peak_areas(self.image(state))
        self.assertAlmostEqual(area_neg / area_pos, 77 / 72, delta=1e-9)
        _, (p0, p1) = attenuation_from_areas(area_neg, area_pos)
        self.assertAlmostEqual(p0, 0.517, delta=1e-3)
        self.assertAlmostEqual(p1, 0.483, delta=1e-3)

    def test_single_peak(self):
        area_neg, area_pos = peak_areas(self.image(ZERO))
        self.assertEqual(area_pos, 0.0)
        _, populations = attenuation_from_areas(area_neg, area_pos)
        self.assertEqual(populations, (1.0, 0.0))

    def test_areas_add_up(self):
        samples = [IntensitySample(x, 1.0 + math.sin(7 * x)) for x in np.linspace(-1.0, 1.3, 37)]
        area_neg, area_pos = peak_areas(samples, boundary=0.1234)
        xs = [s.x for s in samples]
        ys = [s.value for s in samples]
        self.assertAlmostEqual(area_neg + area_pos, float(trapezoid(ys, xs)), delta=1e-12)

    def test_boundary_outside_samples(self):
        with self.assertRaises(EmptyPeak):
            peak_areas(self.image(PLUS), boundary=1e-3)

    def test_attenuation_from_quoted_areas(self):
        ratio, (p0, p1) = attenuation_from_areas(77.0, 72.0)
        self.assertAlmostEqual(ratio, math.sqrt(72 / 77), delta=1e-12)
        self.assertAlmostEqual(ratio, 0.967, delta=1e-3)
        self.assertAlmostEqual(p0 + p1, 1.0, delta=1e-15)

    def test_attenuation_needs_a_left_peak(self):
        with self.assertRaises(UnphysicalParameter):
            attenuation_from_areas(0.0, 5.0)

    def test_areas_serializer_validation(self):
        serializer = PeakAreasSerializer(data={"area_neg": 0.0, "area_pos": 1.0})
        self.assertFalse(serializer.is_valid())
        self.assertIn("area_neg", serializer.errors)

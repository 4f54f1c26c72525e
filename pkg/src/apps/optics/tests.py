# src/apps/optics/tests.py
import io
import math

import numpy as np
from django.test import SimpleTestCase

from apps.qubits.exceptions import UnphysicalParameter
from apps.qubits.states import (
    MINUS,
    PLUS,
    ZERO,
    OracleFunction,
    QubitState,
    apply_map,
    oracle_unitary,
)

from .patterns import (
    TAIL_START,
    EmptyGrid,
    PatternModel,
    SlitGeometry,
    _sinc,
    _tail_moments,
    calibrate_focal_length,
    crossing_point,
    envelope_moments,
    fourier_intensity,
    fringe_term,
    image_intensity,
    sample_pattern,
)
from .quadrature import QuadratureError, adaptive_simpson
from .samples import SampleFileError, read_samples, write_samples

SLIT_WIDTH = 100e-6
SLIT_SEPARATION = 250e-6
WAVELENGTH = 650e-9
CROSSING = 0.11e-3


def bench_geometry():
    return SlitGeometry.from_crossing(SLIT_WIDTH, SLIT_SEPARATION, WAVELENGTH, CROSSING)


def random_state(rng):
    raw = rng.normal(size=2) + 1j * rng.normal(size=2)
    return QubitState.from_amplitudes(raw[0], raw[1])


class QuadratureTests(SimpleTestCase):
    """Adaptive Simpson against closed forms."""

    def test_polynomial_is_exact(self):
        self.assertAlmostEqual(adaptive_simpson(lambda x: x ** 3 - 2 * x, 0.0, 2.0), 0.0, delta=1e-12)
        self.assertAlmostEqual(adaptive_simpson(lambda x: x * x, 0.0, 3.0), 9.0, delta=1e-12)

    def test_oscillatory_integrand(self):
        value = adaptive_simpson(math.sin, 0.0, 10.0 * math.pi + 1.0)
        self.assertAlmostEqual(value, 1.0 - math.cos(1.0), delta=1e-9)

    def test_reversed_bounds_flip_sign(self):
        self.assertAlmostEqual(adaptive_simpson(math.exp, 1.0, 0.0), 1.0 - math.e, delta=1e-9)

    def test_zero_integrand(self):
        self.assertEqual(adaptive_simpson(lambda x: 0.0, -1.0, 1.0), 0.0)

    def test_subdivision_cap(self):
        with self.assertRaises(QuadratureError):
            adaptive_simpson(lambda x: math.sin(1.0 / x), 1e-6, 1.0, rel_tol=1e-12, max_intervals=100)


class GeometryTests(SimpleTestCase):
    """Geometry validation and focal-length calibration."""

    def test_calibrated_focal_length(self):
        f_eff = calibrate_focal_length(CROSSING, slit_separation=SLIT_SEPARATION, wavelength=WAVELENGTH)
        self.assertAlmostEqual(f_eff, 0.16923076923076924, delta=1e-12)
        self.assertAlmostEqual(f_eff * 1e3, 169.2, delta=0.05)

    def test_focal_length_is_linear_in_crossing(self):
        single = calibrate_focal_length(CROSSING, slit_separation=SLIT_SEPARATION, wavelength=WAVELENGTH)
        double = calibrate_focal_length(2 * CROSSING, slit_separation=SLIT_SEPARATION, wavelength=WAVELENGTH)
        self.assertAlmostEqual(double, 2 * single, delta=1e-12)

    def test_crossing_round_trip(self):
        model = PatternModel(bench_geometry(), 1.0)
        self.assertAlmostEqual(crossing_point(model), CROSSING, delta=1e-9)

    def test_overlapping_slits_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            SlitGeometry(300e-6, 250e-6, WAVELENGTH, 0.2)

    def test_visibility_range(self):
        with self.assertRaises(UnphysicalParameter):
            PatternModel(bench_geometry(), 1.2)


class FourierIntensityTests(SimpleTestCase):
    """Fourier-plane patterns of arbitrary signal states."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.model = PatternModel(cls.geometry, 1.0)

    def test_minus_is_dark_at_centre(self):
        self.assertAlmostEqual(fourier_intensity(MINUS, self.model, 0.0), 0.0, delta=1e-9)

    def test_plus_peaks_at_centre(self):
        peak = fourier_intensity(PLUS, self.model, 0.0)
        xs = np.linspace(-2e-3, 2e-3, 401)
        self.assertTrue(all(fourier_intensity(PLUS, self.model, float(x)) <= peak for x in xs))
        self.assertAlmostEqual(peak, 2.0 * self.geometry.normalization, delta=1e-9)

    def test_patterns_cross_at_calibrated_point(self):
        plus = fourier_intensity(PLUS, self.model, CROSSING)
        minus = fourier_intensity(MINUS, self.model, CROSSING)
        self.assertAlmostEqual(plus, minus, delta=1e-9 * plus)

    def test_full_plane_normalization(self):
        rng = np.random.default_rng(11)
        s, c, n = envelope_moments(self.geometry, -math.inf, math.inf)
        self.assertAlmostEqual(s, 1.0, delta=1e-8)
        for _ in range(20):
            rho = random_state(rng).density()
            visibility = rng.uniform(0.0, 1.0)
            total = s + 2 * visibility * (rho.rho01.real * c - rho.rho01.imag * n)
            self.assertAlmostEqual(total, 1.0, delta=1e-6)

    def test_moments_agree_with_direct_quadrature(self):
        rng = np.random.default_rng(12)
        x_lo, x_hi = -3e-3, 2e-3
        s, c, n = envelope_moments(self.geometry, x_lo, x_hi)
        for _ in range(5):
            rho = random_state(rng).density()
            model = PatternModel(self.geometry, rng.uniform(0.0, 1.0))
            direct = adaptive_simpson(lambda x: fourier_intensity(rho, model, x), x_lo, x_hi)
            from_moments = s + 2 * model.visibility * (rho.rho01.real * c - rho.rho01.imag * n)
            self.assertAlmostEqual(direct, from_moments, delta=1e-7)

    def test_closed_form_tails_match_quadrature(self):
        beta = self.geometry.beta
        far = 200 * math.pi
        near = _tail_moments(beta, TAIL_START)
        tail = _tail_moments(beta, far)
        weights = (
            lambda u: 1.0,
            lambda u: math.cos(beta * u),
            lambda u: math.sin(beta * u),
        )
        for index, weight in enumerate(weights):
            body = adaptive_simpson(
                lambda u: _sinc(u) ** 2 * weight(u) / math.pi, TAIL_START, far
            )
            self.assertAlmostEqual(body + tail[index], near[index], delta=1e-10)

    def test_half_planes_add_up(self):
        left = envelope_moments(self.geometry, -math.inf, 37e-6)
        right = envelope_moments(self.geometry, 37e-6, math.inf)
        self.assertAlmostEqual(left[0] + right[0], 1.0, delta=1e-9)
        self.assertAlmostEqual(left[2] + right[2], 0.0, delta=1e-9)
        upper = envelope_moments(self.geometry, 0.0, math.inf)
        self.assertAlmostEqual(upper[0], 0.5, delta=1e-9)

    def test_finite_windows_past_the_central_lobe_add_up(self):
        full = envelope_moments(self.geometry, -math.inf, math.inf)
        for cuts in ((-2.0, -1.0, 0.5), (-3e-3, 1e-3, 1.5), (-1.5, -1e-3, 2.5e-4)):
            with self.subTest(cuts=cuts):
                bounds = (-math.inf,) + cuts + (math.inf,)
                pieces = [envelope_moments(self.geometry, lo, hi) for lo, hi in zip(bounds, bounds[1:])]
                for index in range(3):
                    total = math.fsum(piece[index] for piece in pieces)
                    self.assertAlmostEqual(total, full[index], delta=1e-9)

    def test_mirrored_windows_flip_only_the_odd_moment(self):
        right = envelope_moments(self.geometry, 0.4, 1.3)
        left = envelope_moments(self.geometry, -1.3, -0.4)
        self.assertAlmostEqual(left[0], right[0], delta=1e-12)
        self.assertAlmostEqual(left[1], right[1], delta=1e-12)
        self.assertAlmostEqual(left[2], -right[2], delta=1e-12)

    def test_visibility_identity(self):
        half_period = 0.5 * self.geometry.fringe_period
        for visibility in (0.0, 0.3, 0.75, 1.0):
            model = PatternModel(self.geometry, visibility)
            i_max = fringe_term(PLUS, model, 0.0)
            i_min = fringe_term(PLUS, model, half_period)
            self.assertAlmostEqual((i_max - i_min) / (i_max + i_min), visibility, delta=1e-6)

    def test_plus_and_minus_sum_to_envelope(self):
        for visibility in (0.2, 1.0):
            model = PatternModel(self.geometry, visibility)
            for x in np.linspace(-1.5e-3, 1.5e-3, 31):
                x = float(x)
                total = fourier_intensity(PLUS, model, x) + fourier_intensity(MINUS, model, x)
                self.assertAlmostEqual(total, 2.0 * self.geometry.envelope(x), delta=1e-9)


class ImageIntensityTests(SimpleTestCase):
    """Image-plane peaks carry populations only."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()

    def _areas(self, state, magnification=1.0):
        g = self.geometry
        half = g.a_half * magnification
        centre = g.d_half * magnification
        neg = adaptive_simpson(
            lambda x: image_intensity(state, g, magnification, x), -centre - half, -centre + half
        )
        pos = adaptive_simpson(
            lambda x: image_intensity(state, g, magnification, x), centre - half, centre + half
        )
        return neg, pos

    def test_plus_has_equal_areas(self):
        neg, pos = self._areas(PLUS)
        self.assertAlmostEqual(neg, 0.5, delta=1e-9)
        self.assertAlmostEqual(pos, 0.5, delta=1e-9)

    def test_zero_has_single_negative_peak(self):
        neg, pos = self._areas(ZERO, magnification=2.0)
        self.assertAlmostEqual(neg, 1.0, delta=1e-9)
        self.assertEqual(pos, 0.0)
        self.assertEqual(image_intensity(ZERO, self.geometry, 2.0, 0.0), 0.0)

    def test_phase_is_invisible(self):
        state, _ = apply_map(oracle_unitary(OracleFunction(0, 1)), PLUS)
        neg, pos = self._areas(state)
        self.assertAlmostEqual(neg, 0.5, delta=1e-9)
        self.assertAlmostEqual(pos, 0.5, delta=1e-9)

    def test_magnification_must_be_positive(self):
        with self.assertRaises(UnphysicalParameter):
            image_intensity(PLUS, self.geometry, 0.0, 0.0)


class SamplePatternTests(SimpleTestCase):
    """Uniform sampling and the CSV schema."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.geometry = bench_geometry()
        cls.model = PatternModel(cls.geometry, 1.0)

    def test_scan_grid_is_symmetric(self):
        samples = sample_pattern(PLUS, self.model, -1e-3, 1e-3, 40e-6)
        self.assertEqual(len(samples), 51)
        for left, right in zip(samples, reversed(samples)):
            self.assertEqual(left.x, -right.x)
            self.assertAlmostEqual(left.value, right.value, delta=1e-9)

    def test_minus_grid_contains_zero(self):
        samples = sample_pattern(MINUS, self.model, -1e-3, 1e-3, 40e-6)
        centre = samples[25]
        self.assertEqual(centre.x, 0.0)
        self.assertAlmostEqual(centre.value, 0.0, delta=1e-9)

    def test_heralded_state_shifts_by_quarter_fringe(self):
        quarter = self.geometry.fringe_period / 4.0
        heralded = QubitState.equatorial(math.pi / 2.0)
        for x in np.linspace(-1e-3, 1e-3, 21):
            x = float(x)
            self.assertAlmostEqual(
                fringe_term(heralded, self.model, x),
                fringe_term(PLUS, self.model, x - quarter),
                delta=1e-9,
            )

    def test_empty_grid(self):
        with self.assertRaises(EmptyGrid):
            sample_pattern(PLUS, self.model, 1e-3, -1e-3, 40e-6)
        with self.assertRaises(EmptyGrid):
            sample_pattern(PLUS, self.model, -1e-3, 1e-3, 0.0)

    def test_csv_round_trip(self):
        samples = sample_pattern(MINUS, self.model, -2e-4, 2e-4, 40e-6)
        buffer = io.StringIO()
        write_samples(samples, buffer)
        self.assertTrue(buffer.getvalue().startswith("x_m,intensity_per_m\n"))
        buffer.seek(0)
        self.assertEqual(read_samples(buffer), samples)

    def test_csv_rejects_wrong_header(self):
        with self.assertRaises(SampleFileError):
            read_samples(io.StringIO("x,y\n0,1\n"))

# src/apps/qubits/tests.py
import cmath
import math

import numpy as np
from django.test import SimpleTestCase

from .exceptions import StateAnnihilated, UnphysicalParameter
from .states import (
    ALL_ORACLES,
    MINUS,
    ONE,
    PLUS,
    SQRT_HALF,
    ZERO,
    DiagonalMap,
    MixedState,
    OracleFunction,
    QubitState,
    apply_map,
    classify,
    deutsch_output,
    oracle_unitary,
    overlap,
    slm_map,
    transform_density,
)

TOL = 1e-12


class QubitStateTests(SimpleTestCase):
    """Construction and validation of pure and mixed path states."""

    def test_unnormalized_state_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            QubitState(1.0, 1.0)

    def test_non_finite_amplitude_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            QubitState(float("nan"), 0.0)

    def test_from_amplitudes_normalizes(self):
        state = QubitState.from_amplitudes(3.0, 4.0j)
        self.assertAlmostEqual(abs(state.alpha), 0.6, delta=TOL)
        self.assertAlmostEqual(abs(state.beta), 0.8, delta=TOL)

    def test_density_of_plus(self):
        rho = PLUS.density()
        self.assertAlmostEqual(rho.rho01.real, 0.5, delta=TOL)
        self.assertAlmostEqual(rho.purity(), 1.0, delta=TOL)

    def test_mixed_state_rejects_non_hermitian(self):
        with self.assertRaises(UnphysicalParameter):
            MixedState(0.5, 0.3, 0.1, 0.5)

    def test_mixed_state_rejects_negative_eigenvalue(self):
        with self.assertRaises(UnphysicalParameter):
            MixedState(0.5, 0.8, 0.8, 0.5)

    def test_maximally_mixed_purity(self):
        rho = MixedState(0.5, 0.0, 0.0, 0.5)
        self.assertAlmostEqual(rho.purity(), 0.5, delta=TOL)


class OracleTests(SimpleTestCase):
    """Oracle functions and their unitaries."""

    def test_oracle_unitaries_match_truth_tables(self):
        expected = {"00": (1, 1), "01": (1, -1), "10": (-1, 1), "11": (-1, -1)}
        for f in ALL_ORACLES:
            u = oracle_unitary(f)
            self.assertEqual((u.m0, u.m1), tuple(complex(v) for v in expected[f.label]))

    def test_oracle_unitaries_are_unitary_and_involutive(self):
        for f in ALL_ORACLES:
            u = oracle_unitary(f)
            self.assertTrue(u.is_unitary)
            square = u.compose(u)
            self.assertEqual((square.m0, square.m1), (1, 1))

    def test_classification(self):
        self.assertTrue(OracleFunction(0, 0).is_constant)
        self.assertTrue(OracleFunction(1, 1).is_constant)
        self.assertEqual(OracleFunction(0, 1).kind, "balanced")
        self.assertEqual(OracleFunction.from_label("10"), OracleFunction(1, 0))

    def test_invalid_bits_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            OracleFunction(2, 0)
        with self.assertRaises(UnphysicalParameter):
            OracleFunction.from_label("0x")


class SlmMapTests(SimpleTestCase):
    """Attenuating, phase-shifting modulator maps."""

    def test_identity(self):
        m = slm_map(1, 0, 1, 0)
        self.assertEqual((m.m0, m.m1), (1, 1))

    def test_pi_phase_is_u01(self):
        m = slm_map(1, 0, 1, math.pi)
        self.assertAlmostEqual(abs(m.m1 - (-1)), 0.0, delta=TOL)
        self.assertTrue(m.is_unitary)

    def test_attenuation_is_not_unitary(self):
        m = slm_map(1, 0, 0.5, 0)
        self.assertFalse(m.is_unitary)
        self.assertEqual(m.m1, 0.5)

    def test_gain_rejected(self):
        with self.assertRaises(UnphysicalParameter):
            slm_map(1.2, 0, 1, 0)
        with self.assertRaises(UnphysicalParameter):
            DiagonalMap(1.5, 1.0)


class ApplyMapTests(SimpleTestCase):
    """Post-selected action of diagonal maps."""

    def test_u01_maps_plus_to_minus(self):
        state, survival = apply_map(oracle_unitary(OracleFunction(0, 1)), PLUS)
        self.assertTrue(state.equals_up_to_phase(MINUS))
        self.assertAlmostEqual(survival, 1.0, delta=TOL)

    def test_identity_keeps_plus(self):
        state, survival = apply_map(oracle_unitary(OracleFunction(0, 0)), PLUS)
        self.assertTrue(state.equals_up_to_phase(PLUS))
        self.assertAlmostEqual(survival, 1.0, delta=TOL)

    def test_projective_absorption(self):
        state, survival = apply_map(DiagonalMap(1.0, 0.0), PLUS)
        self.assertTrue(state.equals_up_to_phase(ZERO))
        self.assertAlmostEqual(survival, 0.5, delta=TOL)

    def test_total_absorption_raises(self):
        with self.assertRaises(StateAnnihilated):
            apply_map(DiagonalMap(0.0, 1.0), ZERO)

    def test_survival_equals_trace_of_transformed_density(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            raw = rng.normal(size=2) + 1j * rng.normal(size=2)
            psi = QubitState.from_amplitudes(raw[0], raw[1])
            a0, a1 = rng.uniform(0.05, 1.0, size=2)
            phi0, phi1 = rng.uniform(0, 2 * math.pi, size=2)
            m = slm_map(a0, phi0, a1, phi1)
            _, survival = apply_map(m, psi)
            rho = psi.density().matrix
            expected = np.trace(m.matrix @ rho @ m.matrix.conj().T).real
            self.assertAlmostEqual(survival, expected, delta=TOL)

    def test_transform_density_agrees_with_pure_evolution(self):
        m = slm_map(1.0, 0.3, 0.7, 1.1)
        state, survival = apply_map(m, PLUS)
        rho, rho_survival = transform_density(m, PLUS.density())
        self.assertAlmostEqual(survival, rho_survival, delta=TOL)
        self.assertTrue(rho.is_close(state.density(), TOL))


class DeutschLogicTests(SimpleTestCase):
    """Ideal one-qubit Deutsch algorithm."""

    def test_constant_functions_give_plus(self):
        self.assertTrue(deutsch_output(OracleFunction(0, 0)).equals_up_to_phase(PLUS))
        self.assertTrue(deutsch_output(OracleFunction(1, 1)).equals_up_to_phase(PLUS))

    def test_balanced_functions_give_minus(self):
        self.assertTrue(deutsch_output(OracleFunction(0, 1)).equals_up_to_phase(MINUS))
        out = deutsch_output(OracleFunction(1, 0))
        self.assertTrue(out.equals_up_to_phase(MINUS))
        # f = 10 differs from |-> by the global phase -1
        self.assertAlmostEqual(abs(overlap(MINUS, out) + 1.0), 0.0, delta=TOL)

    def test_balanced_outputs_agree_up_to_global_phase(self):
        a = deutsch_output(OracleFunction(1, 0))
        b = deutsch_output(OracleFunction(0, 1))
        self.assertAlmostEqual(abs(overlap(a, b)), 1.0, delta=TOL)

    def test_discrimination_is_exact(self):
        for f in ALL_ORACLES:
            p_minus = abs(overlap(MINUS, deutsch_output(f))) ** 2
            self.assertAlmostEqual(p_minus, 0.0 if f.is_constant else 1.0, delta=TOL)
            self.assertEqual(classify(deutsch_output(f)), f.kind)

    def test_overlaps(self):
        self.assertAlmostEqual(abs(overlap(PLUS, MINUS)), 0.0, delta=TOL)
        self.assertAlmostEqual(abs(overlap(PLUS, PLUS)), 1.0, delta=TOL)
        self.assertAlmostEqual(overlap(ZERO, PLUS).real, SQRT_HALF, delta=TOL)
        self.assertAlmostEqual(abs(overlap(ONE, QubitState.equatorial(0.4))), SQRT_HALF, delta=TOL)
        self.assertAlmostEqual(
            cmath.phase(overlap(ONE, QubitState.equatorial(0.4))), 0.4, delta=TOL
        )

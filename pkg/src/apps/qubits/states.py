# src/apps/qubits/states.py
"""
Exact linear algebra for one path-encoded qubit.

The inferior slit is |0>, the superior slit is |1>. States, density
matrices and diagonal maps are immutable values; global phases are never
observable, so states are compared through |<a|b>| and never entry by entry.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import StateAnnihilated, UnphysicalParameter

TOLERANCE = 1e-12
SQRT_HALF = 1.0 / math.sqrt(2.0)


def _as_finite_complex(value, name):
    number = complex(value)
    if not (math.isfinite(number.real) and math.isfinite(number.imag)):
        raise UnphysicalParameter(f"{name} must be finite, got {value!r}.")
    return number


# --- Pure states ---
@dataclass(frozen=True)
class QubitState:
    """alpha|0> + beta|1>, normalized within TOLERANCE."""
    alpha: complex
    beta: complex

    def __post_init__(self):
        alpha = _as_finite_complex(self.alpha, "alpha")
        beta = _as_finite_complex(self.beta, "beta")
        norm = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(norm - 1.0) > TOLERANCE:
            raise UnphysicalParameter(f"State is not normalized (|alpha|^2 + |beta|^2 = {norm!r}).")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_amplitudes(cls, alpha, beta):
        """Builds a state from unnormalized amplitudes."""
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm == 0.0:
            raise StateAnnihilated()
        return cls(alpha / norm, beta / norm)

    @classmethod
    def equatorial(cls, phase):
        """(|0> + e^{i phase}|1>)/sqrt(2)."""
        return cls(SQRT_HALF, SQRT_HALF * cmath.exp(1j * phase))

    @property
    def vector(self):
        return np.array([self.alpha, self.beta], dtype=complex)

    def density(self):
        return MixedState(
            self.alpha * self.alpha.conjugate(),
            self.alpha * self.beta.conjugate(),
            self.beta * self.alpha.conjugate(),
            self.beta * self.beta.conjugate(),
        )

    def equals_up_to_phase(self, other, tol=TOLERANCE):
        return abs(abs(overlap(self, other)) - 1.0) <= tol


ZERO = QubitState(1.0, 0.0)
ONE = QubitState(0.0, 1.0)
PLUS = QubitState(SQRT_HALF, SQRT_HALF)
MINUS = QubitState(SQRT_HALF, -SQRT_HALF)


# --- Mixed states ---
@dataclass(frozen=True)
class MixedState:
    """
    2x2 density matrix [[rho00, rho01], [rho10, rho11]].
    rho01 = alpha * conj(beta) for a pure state, so the Fourier-plane cross
    term is 2 Re(rho01 e^{i phi}).
    """
    rho00: complex
    rho01: complex
    rho10: complex
    rho11: complex

    def __post_init__(self):
        for name in ("rho00", "rho01", "rho10", "rho11"):
            object.__setattr__(self, name, _as_finite_complex(getattr(self, name), name))
        if abs(self.rho10 - self.rho01.conjugate()) > TOLERANCE:
            raise UnphysicalParameter("Density matrix is not Hermitian.")
        if abs(self.rho00.imag) > TOLERANCE or abs(self.rho11.imag) > TOLERANCE:
            raise UnphysicalParameter("Density matrix has complex populations.")
        trace = (self.rho00 + self.rho11).real
        if abs(trace - 1.0) > TOLERANCE:
            raise UnphysicalParameter(f"Density matrix trace is {trace!r}, expected 1.")
        if min(self.eigenvalues()) < -TOLERANCE:
            raise UnphysicalParameter("Density matrix has a negative eigenvalue.")

    @classmethod
    def from_matrix(cls, matrix):
        m = np.asarray(matrix, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self):
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    @property
    def populations(self):
        return self.rho00.real, self.rho11.real

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def purity(self):
        """Tr(rho^2), between 1/2 (maximally mixed) and 1 (pure)."""
        return (
            self.rho00.real ** 2 + self.rho11.real ** 2 + 2.0 * abs(self.rho01) ** 2
        )

    def is_close(self, other, tol):
        return bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)


# --- Oracle functions ---
@dataclass(frozen=True)
class OracleFunction:
    """One-bit function f with f0 = f(0), f1 = f(1)."""
    f0: int
    f1: int

    def __post_init__(self):
        for name in ("f0", "f1"):
            if getattr(self, name) not in (0, 1):
                raise UnphysicalParameter(f"{name} must be a bit, got {getattr(self, name)!r}.")

    @classmethod
    def from_label(cls, label):
        """'01' -> f(0)=0, f(1)=1."""
        label = str(label).strip()
        if len(label) != 2 or any(ch not in "01" for ch in label):
            raise UnphysicalParameter(f"Oracle label must be one of 00, 01, 10, 11; got {label!r}.")
        return cls(int(label[0]), int(label[1]))

    @property
    def label(self):
        return f"{self.f0}{self.f1}"

    @property
    def is_constant(self):
        return self.f0 == self.f1

    @property
    def kind(self):
        return "constant" if self.is_constant else "balanced"

    def __str__(self):
        return self.label


ALL_ORACLES = tuple(OracleFunction(i, j) for i in (0, 1) for j in (0, 1))


# --- Diagonal maps ---
@dataclass(frozen=True)
class DiagonalMap:
    """diag(m0, m1); |m_k| <= 1 because the modulator can only attenuate."""
    m0: complex
    m1: complex

    def __post_init__(self):
        for name in ("m0", "m1"):
            value = _as_finite_complex(getattr(self, name), name)
            if abs(value) > 1.0 + TOLERANCE:
                raise UnphysicalParameter(f"|{name}| = {abs(value)!r} exceeds 1 (unphysical gain).")
            object.__setattr__(self, name, value)

    @property
    def matrix(self):
        return np.diag([self.m0, self.m1])

    @property
    def is_unitary(self):
        return abs(abs(self.m0) - 1.0) <= TOLERANCE and abs(abs(self.m1) - 1.0) <= TOLERANCE

    def compose(self, other):
        """self after other."""
        return DiagonalMap(self.m0 * other.m0, self.m1 * other.m1)


def oracle_unitary(f):
    """U_f|x> = (-1)^f(x)|x>."""
    return DiagonalMap(complex((-1) ** f.f0), complex((-1) ** f.f1))


def slm_map(A0, phi0, A1, phi1):
    """Modulator map diag(A0 e^{i phi0}, A1 e^{i phi1}) with attenuations A_k in [0, 1]."""
    for name, value in (("A0", A0), ("A1", A1)):
        if not (0.0 <= value <= 1.0):
            raise UnphysicalParameter(f"{name} = {value!r} outside [0, 1] (unphysical gain).")
    return DiagonalMap(A0 * cmath.exp(1j * phi0), A1 * cmath.exp(1j * phi1))


def apply_map(m, psi):
    """
    Applies a diagonal map and post-selects on survival.
    Returns the renormalized state and the survival probability ||m psi||^2.
    Unitary maps are applied without renormalization.
    """
    alpha = m.m0 * psi.alpha
    beta = m.m1 * psi.beta
    survival = abs(alpha) ** 2 + abs(beta) ** 2
    if survival == 0.0:
        raise StateAnnihilated()
    if m.is_unitary:
        return QubitState(alpha, beta), survival
    norm = math.sqrt(survival)
    return QubitState(alpha / norm, beta / norm), survival


def transform_density(m, rho):
    """The density-matrix form of apply_map: m rho m^dagger / Tr(m rho m^dagger)."""
    out = m.matrix @ rho.matrix @ m.matrix.conj().T
    survival = float(np.trace(out).real)
    if survival == 0.0:
        raise StateAnnihilated()
    if m.is_unitary:
        return MixedState.from_matrix(out), survival
    return MixedState.from_matrix(out / survival), survival


def deutsch_output(f):
    """U_f|+>: |+> for constant f, |-> for balanced f, up to a global phase."""
    state, _ = apply_map(oracle_unitary(f), PLUS)
    return state


def overlap(a, b):
    """<a|b>."""
    return a.alpha.conjugate() * b.alpha + a.beta.conjugate() * b.beta


def born_probability(a, b):
    return abs(overlap(a, b)) ** 2


def classify(psi):
    """Ideal projective readout in the {|+>, |->} basis."""
    return "balanced" if born_probability(MINUS, psi) > 0.5 else "constant"

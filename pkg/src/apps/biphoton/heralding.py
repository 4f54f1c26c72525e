# src/apps/biphoton/heralding.py
"""
Heralded preparation of the signal path qubit from the |psi+> biphoton.

Detecting the idler at x_i projects the signal onto
(|0> + e^{i phi(x_i)}|1>)/sqrt(2) with phi the same relative path phase
that shapes the Fourier-plane fringes. A finite idler slit prepares the
envelope-weighted mixture of those states.
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.optics.patterns import envelope_moments
from apps.qubits.exceptions import SimulationError, UnphysicalParameter
from apps.qubits.states import (
    ALL_ORACLES,
    SQRT_HALF,
    MixedState,
    QubitState,
    oracle_unitary,
    transform_density,
)

logger = logging.getLogger(__name__)

COMMUTATION_TOLERANCE = 1e-9
# Relative heralding weight below which a window is treated as dark.
DARK_WEIGHT = 1e-15


class NoHeralds(SimulationError):
    default_detail = "The idler window collects no light; nothing is heralded."
    default_code = "no_heralds"


class BiphotonKind(enum.Enum):
    PSI_PLUS = "psi_plus"


@dataclass(frozen=True)
class BiphotonState:
    """The two-photon path state; only |psi+> = (|0_s 1_i> + |1_s 0_i>)/sqrt(2) is produced."""
    kind: BiphotonKind = BiphotonKind.PSI_PLUS

    def joint_vector(self):
        """Amplitudes in the |s i> order 00, 01, 10, 11."""
        return np.array([0.0, SQRT_HALF, SQRT_HALF, 0.0], dtype=complex)


@dataclass(frozen=True)
class HeraldWindow:
    """Idler detector slit; width 0 is a point detector, math.inf the whole plane."""
    center: float = 0.0
    width: float = 0.0

    def __post_init__(self):
        if math.isnan(self.width) or self.width < 0:
            raise UnphysicalParameter(f"Herald window width must be >= 0, got {self.width!r}.")
        if not math.isfinite(self.center):
            raise UnphysicalParameter(f"Herald window centre must be finite, got {self.center!r}.")

    @property
    def bounds(self):
        if math.isinf(self.width):
            return -math.inf, math.inf
        return self.center - self.width / 2.0, self.center + self.width / 2.0


def herald_phase(x_i, g):
    """phi(x_i) = 2 pi slit_separation x_i / (wavelength f_eff); odd and linear in x_i."""
    return g.relative_phase(x_i)


def conditional_signal_state(x_i, g):
    return QubitState.equatorial(herald_phase(x_i, g))


def idler_kernel(w, g):
    """
    K[i, i'] = integral over the window of <x|i><x|i'>^* for the idler path states,
    with <x|0> ~ e^{i q d_half} and <x|1> ~ e^{-i q d_half} under the diffraction envelope.
    Returned unnormalized; the trace is twice the heralding weight.
    """
    if w.width == 0:
        phase = g.relative_phase(w.center)
        weight = g.envelope(w.center) / g.normalization
        kernel = weight * np.array(
            [[1.0, np.exp(1j * phase)], [np.exp(-1j * phase), 1.0]], dtype=complex
        )
        return kernel, weight
    s, c, n = envelope_moments(g, *w.bounds)
    kernel = np.array([[s, c + 1j * n], [c - 1j * n, s]], dtype=complex)
    return kernel, s


def herald_joint_state(joint, w, g):
    """Signal density matrix left behind when the idler of `joint` lands in the window."""
    kernel, weight = idler_kernel(w, g)
    if weight <= DARK_WEIGHT:
        raise NoHeralds(f"Herald window {w} collects no light.")
    psi = np.asarray(joint, dtype=complex).reshape(2, 2)
    rho = psi @ kernel @ psi.conj().T
    return MixedState.from_matrix(rho / np.trace(rho).real)


def heralded_mixed_state(w, g):
    """
    Signal state heralded by an idler detection anywhere in the window, i.e. the
    envelope-weighted average of |psi(x_i)><psi(x_i)|. Populations stay at 1/2;
    the coherence is (1/2) <e^{-i phi}> over the window.
    """
    if w.width == 0:
        if g.envelope(w.center) / g.normalization <= DARK_WEIGHT:
            raise NoHeralds(f"Point herald at {w.center!r} sits on an envelope zero.")
        return conditional_signal_state(w.center, g).density()
    s, c, n = envelope_moments(g, *w.bounds)
    if s <= DARK_WEIGHT:
        raise NoHeralds(f"Herald window {w} collects no light.")
    coherence = 0.5 * complex(c, -n) / s
    return MixedState(0.5, coherence, coherence.conjugate(), 0.5)


def verify_commutation(f, w, g):
    """
    Compares heralding-then-oracle with oracle-on-the-signal-half-then-heralding.
    The second ordering is computed from the joint two-photon vector.
    """
    herald_first, _ = transform_density(oracle_unitary(f), heralded_mixed_state(w, g))
    u = oracle_unitary(f).matrix
    joint = np.kron(u, np.eye(2)) @ BiphotonState().joint_vector()
    oracle_first = herald_joint_state(joint, w, g)
    agree = herald_first.is_close(oracle_first, COMMUTATION_TOLERANCE)
    logger.debug("Commutation for f=%s, window %s: %s", f.label, w, agree)
    return agree


# --- Reporting ---
@dataclass(frozen=True)
class HeraldReport:
    window: HeraldWindow
    herald_phase: float
    conditional_state: QubitState
    heralded_state: MixedState
    commutes: dict


def herald_report(w, g):
    """What a herald window prepares, and whether every oracle commutes with it."""
    report = HeraldReport(
        window=w,
        herald_phase=herald_phase(w.center, g),
        conditional_state=conditional_signal_state(w.center, g),
        heralded_state=heralded_mixed_state(w, g),
        commutes={f.label: verify_commutation(f, w, g) for f in ALL_ORACLES},
    )
    logger.info(
        "Herald window %s: purity %.6f, commutation %s",
        w, report.heralded_state.purity(), "ok" if all(report.commutes.values()) else "FAILED",
    )
    return report

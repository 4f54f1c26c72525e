# src/apps/detection/povm.py
"""
Finite-width, finite-efficiency detectors on the Fourier plane.

A detector slit collects the weighted sum of the position kernels
M(x) = N sinc^2(q a_half) [[1, V e^{-i phi}], [V e^{i phi}, 1]]
over its opening, so it measures the positive operator
E = eta * [[s, V (c - i n)], [V (c + i n), s]] built from the envelope moments.
"""

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.optics.patterns import as_density, envelope_moments
from apps.qubits.exceptions import UnphysicalParameter
from apps.qubits.states import ALL_ORACLES, TOLERANCE, deutsch_output

logger = logging.getLogger(__name__)

# Probabilities come out of quadrature, so range checks allow its error.
BOUND_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DetectorConfig:
    """Detector slit of the given width centred at `center`; width math.inf covers the plane."""
    center: float = 0.0
    width: float = 100e-6
    efficiency: float = 1.0

    def __post_init__(self):
        if math.isnan(self.width) or self.width < 0:
            raise UnphysicalParameter(f"Detector width must be >= 0, got {self.width!r}.")
        if not (0.0 <= self.efficiency <= 1.0):
            raise UnphysicalParameter(f"Detector efficiency must lie in [0, 1], got {self.efficiency!r}.")
        if not math.isfinite(self.center):
            raise UnphysicalParameter(f"Detector centre must be finite, got {self.center!r}.")

    @property
    def bounds(self):
        if math.isinf(self.width):
            return -math.inf, math.inf
        return self.center - self.width / 2.0, self.center + self.width / 2.0

    def with_width(self, width):
        return DetectorConfig(self.center, width, self.efficiency)

    def with_efficiency(self, efficiency):
        return DetectorConfig(self.center, self.width, efficiency)


@dataclass(frozen=True)
class PovmElement:
    e00: complex
    e01: complex
    e10: complex
    e11: complex

    def __post_init__(self):
        if abs(complex(self.e10) - complex(self.e01).conjugate()) > TOLERANCE:
            raise UnphysicalParameter("POVM element is not Hermitian.")
        low, high = self.eigenvalues()
        if low < -BOUND_TOLERANCE or high > 1.0 + BOUND_TOLERANCE:
            raise UnphysicalParameter(f"POVM element eigenvalues ({low!r}, {high!r}) outside [0, 1].")

    @property
    def matrix(self):
        return np.array([[self.e00, self.e01], [self.e10, self.e11]], dtype=complex)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def probability(self, state):
        """Tr(E rho)."""
        rho = as_density(state)
        return float(np.trace(self.matrix @ rho.matrix).real)

    def with_coherence_scaled(self, factor):
        """The same detector seen through fringes of `factor` times the visibility."""
        return PovmElement(self.e00, factor * self.e01, factor * self.e10, self.e11)


@dataclass(frozen=True)
class ProbabilityTable:
    """p_ij: probability that the photon is detected when the oracle is f = ij."""
    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        for name in ("p00", "p01", "p10", "p11"):
            value = getattr(self, name)
            if not (-BOUND_TOLERANCE <= value <= 1.0 + BOUND_TOLERANCE):
                raise UnphysicalParameter(f"{name} = {value!r} is not a probability.")

    @property
    def p_c(self):
        return (self.p00 + self.p11) / 2.0

    @property
    def p_b(self):
        return (self.p01 + self.p10) / 2.0

    def for_oracle(self, f):
        return getattr(self, f"p{f.label}")


def probability_between(state, model, x_lo, x_hi, efficiency=1.0):
    """eta times the Fourier-plane probability of landing in [x_lo, x_hi]."""
    if not x_lo < x_hi or efficiency == 0.0:
        return 0.0
    rho = as_density(state)
    s, c, n = envelope_moments(model.geometry, x_lo, x_hi)
    area = s * (rho.rho00 + rho.rho11).real + 2.0 * model.visibility * (
        rho.rho01 * complex(c, n)
    ).real
    return efficiency * area


def window_probability(state, model, det):
    """Probability that `det` clicks for a photon prepared in `state`."""
    return probability_between(state, model, *det.bounds, det.efficiency)


def povm_element(model, det):
    """The operator E with Tr(E rho) = window_probability(rho, model, det)."""
    if det.width == 0:
        return PovmElement(0.0, 0.0, 0.0, 0.0)
    s, c, n = envelope_moments(model.geometry, *det.bounds)
    eta, v = det.efficiency, model.visibility
    coherence = eta * v * complex(c, n)
    return PovmElement(eta * s, coherence.conjugate(), coherence, eta * s)


def probabilities_from_element(element):
    values = {f.label: element.probability(deutsch_output(f)) for f in ALL_ORACLES}
    return ProbabilityTable(values["00"], values["01"], values["10"], values["11"])


def detection_probabilities(model, det):
    """p_ij for the four oracles, each evaluated on the Deutsch output state."""
    table = probabilities_from_element(povm_element(model, det))
    logger.debug(
        "Detection probabilities (width=%g, eta=%g, V=%g): p_c=%.6g p_b=%.6g",
        det.width, det.efficiency, model.visibility, table.p_c, table.p_b,
    )
    return table


def detector_for_state(target, g, width, efficiency=1.0):
    """
    Centres a detector where the Fourier-plane kernel projects on the equatorial
    state `target`; for |-> that is half a fringe period off-axis.
    """
    if abs(abs(target.alpha) - abs(target.beta)) > 1e-9:
        raise UnphysicalParameter("Only equatorial states have a Fourier-plane position.")
    phase = cmath.phase(target.beta / target.alpha) % (2.0 * math.pi)
    return DetectorConfig(g.position_for_phase(phase), width, efficiency)

# src/apps/optics/patterns.py
"""
Fourier-plane and image-plane intensity models behind the double slit.

Positions x are in metres on the detection plane. The transverse
wavenumber is q(x) = 2 pi x / (wavelength * focal_length); slit |0> sits at
-d_half and slit |1> at +d_half, so the relative path phase at x is
phi(x) = 2 q d_half and the Fourier-plane density is

    I(x) = N sinc^2(q a_half) [rho00 + rho11 + 2 V Re(rho01 e^{i phi(x)})]

with N = slit_width / (wavelength * focal_length), which integrates to one
over the whole plane whenever the slits do not overlap.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import sici

from apps.qubits.exceptions import SimulationError, UnphysicalParameter
from apps.qubits.states import MINUS, PLUS, MixedState, QubitState

from .quadrature import adaptive_simpson

logger = logging.getLogger(__name__)

# First zero of the sinc envelope, in units of u = q * a_half.
TAIL_START = math.pi
# Sample grids are snapped to this resolution so that symmetric grids are exactly symmetric.
GRID_DECIMALS = 12


class EmptyGrid(SimulationError):
    default_detail = "Sample grid is empty."
    default_code = "empty_grid"


def as_density(state):
    """Accepts a QubitState or a MixedState."""
    if isinstance(state, QubitState):
        return state.density()
    if isinstance(state, MixedState):
        return state
    raise TypeError(f"Expected QubitState or MixedState, got {type(state).__name__}.")


def _sinc(u):
    if abs(u) < 1e-8:
        return 1.0 - u * u / 6.0
    return math.sin(u) / u


# --- Geometry ---
@dataclass(frozen=True)
class SlitGeometry:
    """
    Double-slit parameters, all in metres.
    slit_width is 2a, slit_separation is 2d (centre to centre) and
    focal_length is the effective Fourier-transform focal length.
    """
    slit_width: float
    slit_separation: float
    wavelength: float
    focal_length: float

    def __post_init__(self):
        for name in ("slit_width", "slit_separation", "wavelength", "focal_length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise UnphysicalParameter(f"{name} must be positive, got {value!r}.")
        if self.slit_separation <= self.slit_width:
            raise UnphysicalParameter("Slits overlap: slit_separation must exceed slit_width.")

    @classmethod
    def from_crossing(cls, slit_width, slit_separation, wavelength, crossing_point):
        focal_length = calibrate_focal_length(
            crossing_point, slit_separation=slit_separation, wavelength=wavelength
        )
        return cls(slit_width, slit_separation, wavelength, focal_length)

    @property
    def a_half(self):
        return self.slit_width / 2.0

    @property
    def d_half(self):
        return self.slit_separation / 2.0

    @property
    def normalization(self):
        return self.slit_width / (self.wavelength * self.focal_length)

    @property
    def fringe_period(self):
        """Distance over which the relative path phase grows by 2 pi."""
        return self.wavelength * self.focal_length / self.slit_separation

    @property
    def beta(self):
        """Relative phase per unit u = q a_half."""
        return self.slit_separation / self.a_half

    def wavenumber(self, x):
        return 2.0 * math.pi * x / (self.wavelength * self.focal_length)

    def relative_phase(self, x):
        """phi(x) = 2 q(x) d_half."""
        return 2.0 * math.pi * self.slit_separation * x / (self.wavelength * self.focal_length)

    def position_for_phase(self, phase):
        return phase * self.wavelength * self.focal_length / (2.0 * math.pi * self.slit_separation)

    def to_u(self, x):
        if math.isinf(x):
            return x
        return self.wavenumber(x) * self.a_half

    def envelope(self, x):
        """Single-slit diffraction density N sinc^2(q a_half); integrates to one."""
        return self.normalization * _sinc(self.wavenumber(x) * self.a_half) ** 2


@dataclass(frozen=True)
class PatternModel:
    """A geometry plus the fringe visibility V that scales every coherence term."""
    geometry: SlitGeometry
    visibility: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.visibility <= 1.0):
            raise UnphysicalParameter(f"visibility must lie in [0, 1], got {self.visibility!r}.")

    def with_visibility(self, visibility):
        return PatternModel(self.geometry, visibility)


@dataclass(frozen=True)
class IntensitySample:
    x: float
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise UnphysicalParameter(f"Intensity must be non-negative, got {self.value!r}.")


# --- Calibration ---
def calibrate_focal_length(x_cross, *, slit_separation, wavelength):
    """
    Focal length that puts the |+>/|-> crossing at x_cross, i.e. phi(x_cross) = pi/2:
    f = 4 slit_separation x_cross / wavelength (= 8 d_half x_cross / wavelength).
    """
    if not x_cross > 0:
        raise UnphysicalParameter(f"Crossing point must be positive, got {x_cross!r}.")
    return 4.0 * slit_separation * x_cross / wavelength


def crossing_point(model):
    """First positive position where the |+> and |-> patterns have equal density."""
    g = model.geometry
    half_period = 0.5 * g.fringe_period

    def difference(x):
        return fourier_intensity(PLUS, model, x) - fourier_intensity(MINUS, model, x)

    return brentq(difference, 0.0, half_period, xtol=1e-15, rtol=1e-14)


# --- Fourier plane ---
def fourier_intensity(state, model, x):
    """Probability density per metre of landing at x in the Fourier plane."""
    return max(model.geometry.envelope(x) * fringe_term(state, model, x), 0.0)


def fringe_term(state, model, x):
    """Fourier-plane density with the diffraction envelope divided out."""
    rho = as_density(state)
    g = model.geometry
    phase = g.relative_phase(x)
    return (rho.rho00 + rho.rho11).real + 2.0 * model.visibility * (
        rho.rho01.real * math.cos(phase) - rho.rho01.imag * math.sin(phase)
    )


def _cos_tail(gamma, X):
    """Integral of cos(gamma u)/u^2 over [X, inf), gamma >= 0, X > 0."""
    if gamma == 0.0:
        return 1.0 / X
    si, _ = sici(gamma * X)
    return math.cos(gamma * X) / X - gamma * (math.pi / 2.0 - si)


def _sin_tail(gamma, X):
    """Integral of sin(gamma u)/u^2 over [X, inf), X > 0."""
    if gamma == 0.0:
        return 0.0
    if gamma < 0.0:
        return -_sin_tail(-gamma, X)
    _, ci = sici(gamma * X)
    return math.sin(gamma * X) / X - gamma * ci


def _tail_moments(beta, X):
    """
    Closed-form (1/pi) * integral over [X, inf) of sinc^2(u) * {1, cos(beta u), sin(beta u)},
    using sin^2 u = (1 - cos 2u)/2 and the sine/cosine integrals.
    """
    s = (1.0 / X - _cos_tail(2.0, X)) / (2.0 * math.pi)
    c = (
        _cos_tail(beta, X)
        - 0.5 * (_cos_tail(beta + 2.0, X) + _cos_tail(abs(beta - 2.0), X))
    ) / (2.0 * math.pi)
    n = (
        _sin_tail(beta, X)
        - 0.5 * (_sin_tail(beta + 2.0, X) + _sin_tail(beta - 2.0, X))
    ) / (2.0 * math.pi)
    return s, c, n


def _outer_moments(beta, near, far):
    """Closed-form moments over [near, far] with TAIL_START <= near < far <= inf."""
    s, c, n = _tail_moments(beta, near)
    if math.isinf(far):
        return s, c, n
    fs, fc, fn = _tail_moments(beta, far)
    return s - fs, c - fc, n - fn


def envelope_moments(g, x_lo, x_hi, rel_tol=None):
    """
    Integrals of N sinc^2(q a_half) * {1, cos phi(x), sin phi(x)} over [x_lo, x_hi].
    Bounds may be infinite. Only the central lobe |u| <= TAIL_START goes through
    quadrature; everything past it is closed-form.
    """
    if not x_lo < x_hi:
        return 0.0, 0.0, 0.0
    beta = g.beta
    u_lo, u_hi = g.to_u(x_lo), g.to_u(x_hi)
    s = c = n = 0.0
    if u_hi > TAIL_START:
        ts, tc, tn = _outer_moments(beta, max(TAIL_START, u_lo), u_hi)
        s, c, n = s + ts, c + tc, n + tn
    if u_lo < -TAIL_START:
        # sinc^2 and cos are even in u, sin is odd.
        ts, tc, tn = _outer_moments(beta, max(TAIL_START, -u_hi), -u_lo)
        s, c, n = s + ts, c + tc, n - tn
    lo, hi = max(u_lo, -TAIL_START), min(u_hi, TAIL_START)
    if lo < hi:
        s += adaptive_simpson(lambda u: _sinc(u) ** 2 / math.pi, lo, hi, rel_tol)
        c += adaptive_simpson(lambda u: _sinc(u) ** 2 * math.cos(beta * u) / math.pi, lo, hi, rel_tol)
        n += adaptive_simpson(lambda u: _sinc(u) ** 2 * math.sin(beta * u) / math.pi, lo, hi, rel_tol)
    return s, c, n


# --- Image plane ---
def image_intensity(state, g, magnification, x):
    """
    Image-plane density: two top-hat peaks of width slit_width * M centred at
    -d_half * M (slit |0>) and +d_half * M (slit |1>), carrying rho00 and rho11.
    Relative phases do not show up here.
    """
    if not magnification > 0:
        raise UnphysicalParameter(f"magnification must be positive, got {magnification!r}.")
    rho = as_density(state)
    half_width = g.a_half * magnification
    height = 1.0 / (g.slit_width * magnification)
    if abs(x + g.d_half * magnification) <= half_width:
        return rho.rho00.real * height
    if abs(x - g.d_half * magnification) <= half_width:
        return rho.rho11.real * height
    return 0.0


# --- Sampling ---
def sample_grid(x_min, x_max, step):
    if not (x_min < x_max) or not step > 0:
        raise EmptyGrid(f"Empty grid: x_min={x_min!r}, x_max={x_max!r}, step={step!r}.")
    count = int(math.floor((x_max - x_min) / step + 1e-9)) + 1
    return np.round(x_min + step * np.arange(count), GRID_DECIMALS)


def sample_pattern(state, model, x_min, x_max, step, plane="fourier", magnification=1.0):
    """Samples the Fourier-plane (or image-plane) density on a uniform grid."""
    rho = as_density(state)
    xs = sample_grid(x_min, x_max, step)
    if plane == "fourier":
        samples = [IntensitySample(float(x), fourier_intensity(rho, model, float(x))) for x in xs]
    elif plane == "image":
        samples = [
            IntensitySample(float(x), image_intensity(rho, model.geometry, magnification, float(x)))
            for x in xs
        ]
    else:
        raise UnphysicalParameter(f"Unknown plane {plane!r}; expected 'fourier' or 'image'.")
    logger.debug("Sampled %d points of the %s plane on [%g, %g]", len(samples), plane, x_min, x_max)
    return samples

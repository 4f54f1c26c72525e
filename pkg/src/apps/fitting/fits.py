# src/apps/fitting/fits.py
"""
Least-squares recovery of fringe parameters and image-plane peak areas.

Both Fourier-plane patterns of a pair are modelled as
    A sinc^2(q a_half) (1 + V cos(2 q d_half + phi_k)),   q = q(x - x0),
sharing A, V and x0, with phi = 0 for the reference pattern. The envelope
is fixed by the geometry.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import least_squares

from apps.qubits.exceptions import SimulationError, UnphysicalParameter

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8
PHASE_SEEDS = 64
MAX_EVALUATIONS = 200
STEP_TOLERANCE = 1e-10
# x0 is optimized in micrometres to keep the parameters of similar size.
MICRON = 1e-6


class FitFailed(SimulationError):
    default_detail = "Least-squares fit did not converge."
    default_code = "fit_failed"


class NoFringes(SimulationError):
    default_detail = "Pattern data carry no fringes to fit."
    default_code = "no_fringes"


class EmptyPeak(SimulationError):
    default_detail = "No samples on one side of the peak boundary."
    default_code = "empty_peak"


@dataclass(frozen=True)
class FitResult:
    amplitude: float
    visibility: float
    delta_phi: float
    center_offset: float
    residual_rms: float
    evaluations: int = 0


# --- Model ---
def _sinc(u):
    return np.sinc(u / np.pi)


def _sinc_derivative(u):
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    return np.where(small, -u / 3.0, (np.cos(safe) - np.sin(safe) / safe) / safe)


def fringe_model(g, x, amplitude, visibility, phase, center=0.0):
    """A sinc^2(q a_half) (1 + V cos(2 q d_half + phase)) with q measured from `center`."""
    q = g.wavenumber(1.0) * (np.asarray(x, dtype=float) - center)
    return amplitude * _sinc(q * g.a_half) ** 2 * (1.0 + visibility * np.cos(2.0 * q * g.d_half + phase))


def _split(samples):
    x = np.array([s.x for s in samples], dtype=float)
    y = np.array([s.value for s in samples], dtype=float)
    return x, y


def _check_data(x, y, g):
    if len(x) < MIN_SAMPLES:
        raise UnphysicalParameter(f"Need at least {MIN_SAMPLES} samples per pattern, got {len(x)}.")
    if np.ptp(x) < g.fringe_period:
        raise UnphysicalParameter("Samples must span at least one fringe period.")
    if not np.all(np.isfinite(y)):
        raise UnphysicalParameter("Pattern values must be finite.")
    if np.ptp(y) == 0.0:
        raise NoFringes("All pattern values are equal.")


# --- Seeding ---
def _seed(g, x_ref, y_ref, x_shift, y_shift):
    """
    Centroid for x0, then for each trial phase the amplitude pair (A, A V)
    solves a linear least-squares problem; the best phase seeds the refinement.
    """
    weights = np.concatenate([y_ref, y_shift])
    positions = np.concatenate([x_ref, x_shift])
    center = float(np.sum(weights * positions) / np.sum(weights))
    k = g.wavenumber(1.0)
    env_ref = _sinc(k * (x_ref - center) * g.a_half) ** 2
    env_shift = _sinc(k * (x_shift - center) * g.a_half) ** 2
    theta_ref = 2.0 * k * (x_ref - center) * g.d_half
    theta_shift = 2.0 * k * (x_shift - center) * g.d_half
    target = np.concatenate([y_ref, y_shift])

    best = None
    for phase in np.linspace(0.0, 2.0 * np.pi, PHASE_SEEDS, endpoint=False):
        design = np.column_stack([
            np.concatenate([env_ref, env_shift]),
            np.concatenate([env_ref * np.cos(theta_ref), env_shift * np.cos(theta_shift + phase)]),
        ])
        coefficients, *_ = np.linalg.lstsq(design, target, rcond=None)
        cost = float(np.sum((design @ coefficients - target) ** 2))
        if best is None or cost < best[0]:
            best = (cost, phase, coefficients)

    _, phase, (a, av) = best
    amplitude = float(a) if a > 0 else float(np.mean(target))
    visibility = float(np.clip(av / amplitude, 0.0, 1.0))
    return np.array([amplitude, visibility, phase, center / MICRON])


# --- Fitting ---
def fit_pattern_pair(reference, shifted, g):
    """Joint fit of a reference pattern and a phase-shifted one; returns the relative phase."""
    x_ref, y_ref = _split(reference)
    x_shift, y_shift = _split(shifted)
    _check_data(x_ref, y_ref, g)
    _check_data(x_shift, y_shift, g)
    if np.all(y_ref == 0.0) or np.all(y_shift == 0.0) or np.sum(y_ref) + np.sum(y_shift) <= 0.0:
        raise NoFringes("A pattern carries no light.")

    k = g.wavenumber(1.0)

    def residuals(params):
        amplitude, visibility, phase, center_um = params
        center = center_um * MICRON
        return np.concatenate([
            fringe_model(g, x_ref, amplitude, visibility, 0.0, center) - y_ref,
            fringe_model(g, x_shift, amplitude, visibility, phase, center) - y_shift,
        ])

    def block_jacobian(x, amplitude, visibility, phase, center, shifted_block):
        u = k * (x - center) * g.a_half
        theta = 2.0 * k * (x - center) * g.d_half + phase
        sinc = _sinc(u)
        env = sinc ** 2
        fringe = 1.0 + visibility * np.cos(theta)
        d_env = 2.0 * sinc * _sinc_derivative(u) * k * g.a_half
        d_fringe = -visibility * np.sin(theta) * 2.0 * k * g.d_half
        columns = [
            env * fringe,
            amplitude * env * np.cos(theta),
            -amplitude * env * visibility * np.sin(theta) if shifted_block else np.zeros_like(x),
            -amplitude * (d_env * fringe + env * d_fringe) * MICRON,
        ]
        return np.column_stack(columns)

    def jacobian(params):
        amplitude, visibility, phase, center_um = params
        center = center_um * MICRON
        return np.vstack([
            block_jacobian(x_ref, amplitude, visibility, 0.0, center, False),
            block_jacobian(x_shift, amplitude, visibility, phase, center, True),
        ])

    start = _seed(g, x_ref, y_ref, x_shift, y_shift)
    logger.debug("Fit seed: A=%.6g V=%.4f phi=%.4f x0=%.3f um", *start)
    solution = least_squares(
        residuals,
        start,
        jac=jacobian,
        bounds=([0.0, 0.0, -np.inf, -np.inf], [np.inf, 1.0, np.inf, np.inf]),
        method="trf",
        x_scale="jac",
        xtol=STEP_TOLERANCE,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=MAX_EVALUATIONS,
    )
    if solution.status <= 0 or not np.all(np.isfinite(solution.x)):
        raise FitFailed(f"Optimizer stopped without converging: {solution.message}")

    amplitude, visibility, phase, center_um = solution.x
    delta_phi = float(phase % (2.0 * math.pi))
    if 2.0 * math.pi - delta_phi < 1e-9:
        delta_phi = 0.0
    result = FitResult(
        amplitude=float(amplitude),
        visibility=float(visibility),
        delta_phi=delta_phi,
        center_offset=float(center_um * MICRON),
        residual_rms=float(np.sqrt(np.mean(solution.fun ** 2))),
        evaluations=int(solution.nfev),
    )
    logger.info(
        "Fringe fit: V=%.4f delta_phi=%.4f rad x0=%.3f um (rms %.3g, %d evaluations)",
        result.visibility, result.delta_phi, result.center_offset / MICRON, result.residual_rms, result.evaluations,
    )
    return result


# --- Image plane ---
def peak_areas(samples, boundary=0.0):
    """
    Trapezoidal areas left and right of `boundary`; left is the |0> slit,
    right the |1> slit. A boundary between samples is split by linear interpolation.
    """
    x, y = _split(samples)
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    if len(x) < 2 or not (x[0] < boundary < x[-1]):
        raise EmptyPeak(f"Boundary {boundary!r} does not split the sampled range.")
    y_boundary = float(np.interp(boundary, x, y))
    left = x < boundary
    right = x > boundary
    area_neg = float(trapezoid(np.append(y[left], y_boundary), np.append(x[left], boundary)))
    area_pos = float(trapezoid(np.insert(y[right], 0, y_boundary), np.insert(x[right], 0, boundary)))
    return area_neg, area_pos


def attenuation_from_areas(area_neg, area_pos):
    """
    Amplitude ratio A1/A0 = sqrt(area_pos / area_neg) that the modulator must
    have applied, and the normalized slit populations.
    """
    if not (area_neg > 0 and area_pos >= 0):
        raise UnphysicalParameter(f"Peak areas must be positive, got {area_neg!r} and {area_pos!r}.")
    total = area_neg + area_pos
    return math.sqrt(area_pos / area_neg), (area_neg / total, area_pos / total)

# src/apps/inference/betting.py
"""
Single-query betting on constant versus balanced.

Probability tables passed in here are landing probabilities (detector
efficiency 1); the overall detection efficiency eta is applied once, in
these formulas. Oracles are drawn with the uniform prior P(f) = 1/4.
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from apps.detection.povm import (
    DetectorConfig,
    detection_probabilities,
    povm_element,
    probabilities_from_element,
)
from apps.optics.patterns import envelope_moments, fourier_intensity, sample_grid
from apps.optics.quadrature import adaptive_simpson
from apps.qubits.exceptions import SimulationError, UnphysicalParameter
from apps.qubits.states import MINUS, PLUS

logger = logging.getLogger(__name__)

CALIBRATION_TOLERANCE = 1e-6


class NoDetections(SimulationError):
    default_detail = "The detector can never click; the posterior given a detection is undefined."
    default_code = "no_detections"


class TargetUnattainable(SimulationError):
    default_detail = "Target success probability exceeds what the ideal model reaches."
    default_code = "target_unattainable"


class DecisionRule(enum.Enum):
    """What a click means; the other outcome gets the other answer."""
    DETECT_CONSTANT = "constant"
    DETECT_BALANCED = "balanced"

    @property
    def other(self):
        if self is DecisionRule.DETECT_CONSTANT:
            return DecisionRule.DETECT_BALANCED
        return DecisionRule.DETECT_CONSTANT


@dataclass(frozen=True)
class BetOutcome:
    p_success: float
    posterior_constant_given_detection: float
    posterior_balanced_given_no_detection: float
    decision_rule: DecisionRule


@dataclass(frozen=True)
class ScanResult:
    """P(S) against detector width; the optimum is the smallest width reaching the maximum."""
    widths: tuple
    p_success_curve: tuple
    rules: tuple
    optimal_width: float
    optimal_p: float
    visibility: float
    eta: float


def _check_eta(eta):
    if not (0.0 <= eta <= 1.0):
        raise UnphysicalParameter(f"eta must lie in [0, 1], got {eta!r}.")


# --- Betting formulas ---
def success_probability(table, eta, rule=DecisionRule.DETECT_CONSTANT):
    """
    Averages the per-oracle success over the uniform prior. With detect=>constant:
    P(S) = 1/4 [eta p00 + eta p11 + (1 - eta p01) + (1 - eta p10)].
    """
    _check_eta(eta)
    constant_hit = 0.25 * (eta * table.p00 + eta * table.p11 + (1.0 - eta * table.p01) + (1.0 - eta * table.p10))
    if rule is DecisionRule.DETECT_CONSTANT:
        return constant_hit
    return 1.0 - constant_hit


def best_rule(table):
    return DecisionRule.DETECT_CONSTANT if table.p_c >= table.p_b else DecisionRule.DETECT_BALANCED


def bayes_posteriors(table, eta):
    """
    (P(constant | detection), P(balanced | no detection)).
    When a miss is impossible (whole plane, eta = 1) the likelihoods are equal
    and the second posterior falls back to the prior 1/2.
    """
    _check_eta(eta)
    p_c, p_b = table.p_c, table.p_b
    if p_c + p_b == 0.0:
        raise NoDetections()
    given_detection = p_c / (p_c + p_b)
    miss = 2.0 - eta * (p_c + p_b)
    given_miss = 0.5 if miss <= 0.0 else (1.0 - eta * p_b) / miss
    return given_detection, given_miss


def evaluate_bet(table, eta, rule=None):
    """Bundles P(S) and both posteriors; without a rule the better one is used."""
    rule = rule or best_rule(table)
    posterior_detection, posterior_miss = bayes_posteriors(table, eta)
    return BetOutcome(
        success_probability(table, eta, rule), posterior_detection, posterior_miss, rule
    )


def decide(detected, rule=DecisionRule.DETECT_CONSTANT):
    """'constant' or 'balanced' for one detect/no-detect outcome."""
    return rule.value if detected else rule.other.value


# --- Detector width ---
def scan_detector_width(model, eta, w_min, w_max, step, center=0.0):
    if not (0.0 < w_min < w_max) or not step > 0:
        raise UnphysicalParameter(f"Invalid scan range [{w_min!r}, {w_max!r}] step {step!r}.")
    _check_eta(eta)
    widths = sample_grid(w_min, w_max, step)
    curve, rules = [], []
    for width in widths:
        table = detection_probabilities(model, DetectorConfig(center, float(width), 1.0))
        rule = best_rule(table)
        curve.append(success_probability(table, eta, rule))
        rules.append(rule)
    best = int(np.argmax(curve))
    result = ScanResult(
        widths=tuple(float(w) for w in widths),
        p_success_curve=tuple(curve),
        rules=tuple(rules),
        optimal_width=float(widths[best]),
        optimal_p=curve[best],
        visibility=model.visibility,
        eta=eta,
    )
    logger.info(
        "Width scan over %d detectors: optimum %.1f um with P(S)=%.4f (V=%.4f, eta=%.3f)",
        len(curve), result.optimal_width * 1e6, result.optimal_p, model.visibility, eta,
    )
    return result


# --- Calibration ---
def calibrate_visibility(model, det, target_p, eta=None):
    """
    Visibility V for which the detector `det` reaches P(S) = target_p under
    detect=>constant. eta defaults to the detector's own efficiency.
    """
    eta = det.efficiency if eta is None else eta
    _check_eta(eta)
    landing = det.with_efficiency(1.0)
    ideal = povm_element(model.with_visibility(1.0), landing)

    def p_success(visibility):
        return success_probability(probabilities_from_element(ideal.with_coherence_scaled(visibility)), eta)

    floor, ceiling = p_success(0.0), p_success(1.0)
    if abs(target_p - floor) <= 1e-12:
        return 0.0
    if abs(target_p - ceiling) <= 1e-12:
        return 1.0
    if not (floor < target_p < ceiling):
        raise TargetUnattainable(
            f"P(S) = {target_p!r} is outside the reachable range [{floor:.6f}, {ceiling:.6f}]."
        )
    visibility = bisect(lambda v: p_success(v) - target_p, 0.0, 1.0, xtol=1e-13, maxiter=200)
    if abs(p_success(visibility) - target_p) > CALIBRATION_TOLERANCE:
        raise TargetUnattainable(f"Bisection stalled at V = {visibility!r}.")
    logger.info("Calibrated visibility V=%.6f for P(S)=%.4f at width %g m", visibility, target_p, det.width)
    return visibility


# --- Position-resolving detector ---
def _resolved_area(model, x_lo, x_hi):
    """Integral of max(I+, I-) over [x_lo, x_hi], split where cos(phi) changes sign."""
    g = model.geometry
    quarter = g.fringe_period / 4.0
    first = math.ceil((x_lo - quarter) / (2.0 * quarter))
    last = math.floor((x_hi - quarter) / (2.0 * quarter))
    cuts = [x_lo] + [quarter + 2.0 * quarter * k for k in range(first, last + 1)] + [x_hi]
    cuts = sorted(x for x in set(cuts) if x_lo <= x <= x_hi)

    def brighter(x):
        return max(fourier_intensity(PLUS, model, x), fourier_intensity(MINUS, model, x))

    return math.fsum(adaptive_simpson(brighter, a, b) for a, b in zip(cuts, cuts[1:]) if a < b)


def resolved_success_probability(model, eta, x_lo=-math.inf, x_hi=math.inf):
    """
    Success probability with a position-resolving camera over [x_lo, x_hi]: a click
    at x is bet on whichever of the constant and balanced densities is larger there,
    a miss on the likelier miss hypothesis.

    Over the whole plane the answer is 1/2 + eta V / pi: the harmonics of |cos phi|
    lie outside the band of sinc^2 whenever the slits do not overlap.
    """
    _check_eta(eta)
    if math.isinf(x_lo) and math.isinf(x_hi):
        return 0.5 + eta * model.visibility / math.pi
    if not (math.isfinite(x_lo) and math.isfinite(x_hi)) or not x_lo < x_hi:
        raise UnphysicalParameter("A camera window must be finite or cover the whole plane.")
    s, c, _ = envelope_moments(model.geometry, x_lo, x_hi)
    p_c = s + model.visibility * c
    p_b = s - model.visibility * c
    area = _resolved_area(model, x_lo, x_hi)
    return 0.5 * eta * area + 0.5 * (1.0 - eta * min(p_c, p_b))

# src/apps/optics/quadrature.py
"""Adaptive Simpson quadrature shared by every integral over a detection plane."""

import logging
import math

from django.conf import settings

from apps.qubits.exceptions import SimulationError

logger = logging.getLogger(__name__)

# Initial uniform panels; also used to estimate the integral's scale.
SEED_PANELS = 32


class QuadratureError(SimulationError):
    default_detail = "Adaptive quadrature exceeded its subdivision cap."
    default_code = "quadrature_failed"


def _simpson(h, fa, fm, fb):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f, a, b, rel_tol=None, max_intervals=None):
    """
    Integrates f over the finite interval [a, b].

    The tolerance is relative to the integral of |f| estimated on the seed
    panels, so oscillating integrands with small net area still converge.
    Each accepted interval carries Richardson's correction.
    """
    rel_tol = settings.QUADRATURE["rel_tol"] if rel_tol is None else rel_tol
    max_intervals = settings.QUADRATURE["max_intervals"] if max_intervals is None else max_intervals
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, rel_tol, max_intervals)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise QuadratureError("adaptive_simpson needs finite bounds.")

    width = (b - a) / SEED_PANELS
    nodes = [a + i * width / 2.0 for i in range(2 * SEED_PANELS)] + [b]
    values = [f(x) for x in nodes]

    stack = []
    scale = 0.0
    for i in range(SEED_PANELS):
        lo, mid, hi = 2 * i, 2 * i + 1, 2 * i + 2
        fa, fm, fb = values[lo], values[mid], values[hi]
        scale += _simpson(width, abs(fa), abs(fm), abs(fb))
        stack.append((nodes[lo], nodes[hi], fa, fm, fb, _simpson(width, fa, fm, fb)))
    if scale == 0.0:
        return 0.0

    panel_tol = rel_tol * scale / SEED_PANELS
    stack = [entry + (panel_tol,) for entry in stack]
    parts = []
    processed = 0
    while stack:
        lo, hi, fa, fm, fb, whole, tol = stack.pop()
        processed += 1
        if processed > max_intervals:
            raise QuadratureError(
                f"Adaptive quadrature on [{a!r}, {b!r}] exceeded {max_intervals} intervals."
            )
        mid = 0.5 * (lo + hi)
        h = hi - lo
        flm = f(0.5 * (lo + mid))
        frm = f(0.5 * (mid + hi))
        left = _simpson(h / 2.0, fa, flm, fm)
        right = _simpson(h / 2.0, fm, frm, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol or mid in (lo, hi):
            parts.append(left + right + delta / 15.0)
        else:
            stack.append((lo, mid, fa, flm, fm, left, tol / 2.0))
            stack.append((mid, hi, fm, frm, fb, right, tol / 2.0))

    logger.debug("adaptive_simpson [%g, %g]: %d intervals", a, b, processed)
    return math.fsum(parts)

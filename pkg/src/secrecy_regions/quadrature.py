"""
Adaptive Simpson quadrature.

Iterative left-to-right subdivision with per-panel tolerance halving and a
Richardson correction on every accepted panel. Accepted panels are summed with
``math.fsum`` so the result does not depend on accumulation order.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from secrecy_regions.types import NumericalError, ValidationError, fail

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
MAX_PANELS = 2**20
MAX_DEPTH = 60


@dataclass(frozen=True, slots=True)
class QuadratureResult:
    """Integral value, summed error estimate and number of accepted panels."""

    value: float
    error: float
    panels: int


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tolerance: float = DEFAULT_TOLERANCE,
    max_panels: int = MAX_PANELS,
) -> QuadratureResult:
    """
    Integrate ``f`` over [a, b] to absolute ``tolerance``.

    Raises a numerical error when the panel cap or the depth cap forces
    acceptance of panels whose summed error estimate exceeds the tolerance.
    """
    if not tolerance > 0:
        raise fail(ValidationError(field="tolerance", message=f"{tolerance} must be > 0"))
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if a > b:
        flipped = adaptive_simpson(f, b, a, tolerance, max_panels)
        return QuadratureResult(-flipped.value, flipped.error, flipped.panels)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    stack = [(a, b, fa, fm, fb, _simpson(fa, fm, fb, b - a), tolerance, 0)]
    pieces: list[float] = []
    errors: list[float] = []
    forced = False

    while stack:
        lo, hi, flo, fmid, fhi, whole, tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left_mid, right_mid = 0.5 * (lo + mid), 0.5 * (mid + hi)
        fl, fr = f(left_mid), f(right_mid)
        left = _simpson(flo, fl, fmid, mid - lo)
        right = _simpson(fmid, fr, fhi, hi - mid)
        delta = left + right - whole

        saturated = depth >= MAX_DEPTH or len(pieces) + len(stack) + 2 > max_panels
        if abs(delta) <= 15.0 * tol or saturated:
            forced = forced or abs(delta) > 15.0 * tol
            pieces.append(left + right + delta / 15.0)
            errors.append(abs(delta) / 15.0)
            continue
        # Right half first so the left half is popped next.
        stack.append((mid, hi, fmid, fr, fhi, right, tol / 2.0, depth + 1))
        stack.append((lo, mid, flo, fl, fmid, left, tol / 2.0, depth + 1))

    error = math.fsum(errors)
    if forced and error > tolerance:
        logger.warning(f"Adaptive Simpson on [{a:g}, {b:g}] stopped at error {error:.3g}")
        raise fail(NumericalError("adaptive_simpson", achieved=error, requested=tolerance))
    return QuadratureResult(math.fsum(pieces), error, len(pieces))


def integrate_piecewise(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    tolerance: float = DEFAULT_TOLERANCE,
) -> QuadratureResult:
    """
    Integrate over [a, b] split at the interior ``breakpoints``.

    The tolerance is shared equally between the pieces.
    """
    if b <= a:
        return QuadratureResult(0.0, 0.0, 0)
    edges = sorted({a, b, *(x for x in breakpoints if a < x < b)})
    share = tolerance / (len(edges) - 1)
    results = [adaptive_simpson(f, lo, hi, share) for lo, hi in zip(edges, edges[1:])]
    return QuadratureResult(
        value=math.fsum(r.value for r in results),
        error=math.fsum(r.error for r in results),
        panels=sum(r.panels for r in results),
    )

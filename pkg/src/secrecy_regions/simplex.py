"""
Projected gradient ascent over a scaled probability simplex.

Used by the fading power allocation: layer powers are non-negative and sum to
the power budget. Steps are Barzilai-Borwein with Armijo backtracking along the
projection arc.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from secrecy_regions.types import ValidationError, fail

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
Objective = Callable[[FloatArray], tuple[float, FloatArray]]

ARMIJO = 1e-4
MIN_STEP = 1e-16
MAX_STEP = 1e12


def project_simplex(values: ArrayLike, total: float = 1.0) -> FloatArray:
    """Euclidean projection onto {x >= 0, sum(x) = total} by sorting."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise fail(ValidationError(field="values", message="must be a non-empty vector"))
    if total < 0:
        raise fail(ValidationError(field="total", message=f"{total} must be >= 0"))
    ordered = np.sort(v)[::-1]
    excess = np.cumsum(ordered) - total
    ranks = np.arange(1, v.size + 1)
    active = np.nonzero(ordered - excess / ranks > 0)[0]
    last = int(active[-1]) if active.size else v.size - 1
    threshold = excess[last] / (last + 1)
    return np.maximum(v - threshold, 0.0)


@dataclass(frozen=True, slots=True)
class AscentResult:
    """Outcome of ``maximize_on_simplex``."""

    x: FloatArray
    value: float
    iterations: int
    converged: bool
    message: str


def maximize_on_simplex(
    fun: Objective,
    x0: ArrayLike,
    total: float,
    rel_tol: float = 1e-10,
    max_iter: int = 20000,
    patience: int = 5,
) -> AscentResult:
    """
    Maximize ``fun`` (returning value and gradient) over the scaled simplex.

    Stops once the relative improvement stays below ``rel_tol`` for
    ``patience`` consecutive iterations, when a full step no longer moves the
    point, or at ``max_iter``. Backtracking that finds no ascent step stops with
    ``converged=False`` unless the full step promised no more than ``rel_tol``
    of first-order gain.
    """
    x = project_simplex(x0, total)
    value, grad = fun(x)
    norm = float(np.linalg.norm(grad))
    step = 1.0 / norm if norm > 0 else 1.0
    quiet = 0

    for iteration in range(1, max_iter + 1):
        candidate = project_simplex(x + step * grad, total)
        move = candidate - x
        if not np.any(move):
            return AscentResult(x, value, iteration, True, "projected step vanished")
        predicted = float(grad @ move)
        while True:
            new_value, new_grad = fun(candidate)
            if new_value >= value + ARMIJO * float(grad @ move):
                break
            step /= 2.0
            candidate = project_simplex(x + step * grad, total)
            move = candidate - x
            if step < MIN_STEP or not np.any(move):
                stationary = predicted <= rel_tol * max(abs(value), 1.0)
                if not stationary:
                    logger.warning(f"Line search exhausted at value {value:.12g}")
                return AscentResult(x, value, iteration, stationary, "line search exhausted")

        improvement = new_value - value
        s, y = move, new_grad - grad
        curvature = float(s @ y)
        step = float(s @ s) / -curvature if curvature < 0 else step * 2.0
        step = min(max(step, MIN_STEP), MAX_STEP)
        x, value, grad = candidate, new_value, new_grad

        quiet = quiet + 1 if improvement <= rel_tol * max(abs(value), 1e-300) else 0
        if quiet >= patience:
            return AscentResult(x, value, iteration, True, "relative improvement below tolerance")
        if iteration % 1000 == 0:
            logger.debug(f"Ascent iteration {iteration}: value={value:.12g}, step={step:.3g}")

    logger.warning(f"Projected ascent hit the iteration cap ({max_iter}) at value {value:.12g}")
    return AscentResult(x, value, max_iter, False, "iteration cap reached")

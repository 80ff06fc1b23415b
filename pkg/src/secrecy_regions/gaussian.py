"""
Secrecy rate region of the Gaussian broadcast channel with an eavesdropper.

Receivers see Y1 = X + N1, Y2 = X + N2 and the eavesdropper Z = X + N3 with
noise variances sigma1^2 <= sigma2^2 <= sigma3^2. A power split alpha puts
alpha*P on the layer for receiver 1 and the remainder on the cloud layer for
receiver 2. The non-secret comparison region drops the eavesdropper terms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from secrecy_regions.region import RatePoint, RateRegion, region_from_cloud
from secrecy_regions.types import ValidationError, fail

logger = logging.getLogger(__name__)


def capacity(snr: float) -> float:
    """C(x) = 1/2 log2(1 + x) in bits, via log1p."""
    return 0.5 * math.log1p(snr) / math.log(2.0)


@dataclass(frozen=True, slots=True)
class GaussianBceParams:
    """Transmit power and the three noise variances (linear units)."""

    power: float
    sigma1_sq: float
    sigma2_sq: float
    sigma3_sq: float

    def __post_init__(self) -> None:
        if not self.power > 0:
            raise fail(ValidationError(field="power", message=f"{self.power} must be > 0"))
        if not 0 < self.sigma1_sq <= self.sigma2_sq <= self.sigma3_sq:
            raise fail(
                ValidationError(
                    field="sigmas",
                    message=(
                        f"need 0 < {self.sigma1_sq} <= {self.sigma2_sq} <= {self.sigma3_sq}"
                    ),
                )
            )


@dataclass(frozen=True, slots=True)
class GaussianSplit:
    """Fraction of power given to the receiver-1 layer."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise fail(ValidationError(field="alpha", message=f"{self.alpha} not in [0, 1]"))


def secret_rate_pair(params: GaussianBceParams, split: GaussianSplit) -> RatePoint:
    """Secret rates (R1, R2) for one power split."""
    layer1 = split.alpha * params.power
    cloud = (1.0 - split.alpha) * params.power
    r1 = capacity(layer1 / params.sigma1_sq) - capacity(layer1 / params.sigma3_sq)
    r2 = capacity(cloud / (layer1 + params.sigma2_sq)) - capacity(
        cloud / (layer1 + params.sigma3_sq)
    )
    return RatePoint(max(0.0, r1), max(0.0, r2))


def nonsecret_rate_pair(params: GaussianBceParams, split: GaussianSplit) -> RatePoint:
    """Classical degraded Gaussian broadcast rates with no eavesdropper."""
    layer1 = split.alpha * params.power
    cloud = (1.0 - split.alpha) * params.power
    return RatePoint(
        capacity(layer1 / params.sigma1_sq),
        capacity(cloud / (layer1 + params.sigma2_sq)),
    )


def region_boundary(params: GaussianBceParams, n_points: int) -> RateRegion:
    """
    Sweep alpha uniformly on [0, 1] and keep the convex Pareto frontier.

    Vertex parameters are the alpha values that generated them.
    """
    if n_points < 2:
        raise fail(ValidationError(field="n_points", message=f"{n_points} must be >= 2"))
    alphas = np.linspace(0.0, 1.0, n_points)
    pairs = [secret_rate_pair(params, GaussianSplit(float(a))) for a in alphas]
    cloud = np.array([[p.r1, p.r2] for p in pairs])
    logger.debug(f"Gaussian sweep: {n_points} splits, max R1={cloud[:, 0].max():.6f}")
    return region_from_cloud(
        cloud,
        [float(a) for a in alphas],
        keys=[f"{a:.17f}" for a in alphas],
        metadata={"n_points": n_points},
    )


def sweep_table(
    params: GaussianBceParams, n_points: int
) -> list[tuple[float, RatePoint, RatePoint]]:
    """Rows (alpha, secret pair, non-secret pair) for every swept alpha."""
    if n_points < 2:
        raise fail(ValidationError(field="n_points", message=f"{n_points} must be >= 2"))
    rows = []
    for alpha in np.linspace(0.0, 1.0, n_points):
        split = GaussianSplit(float(alpha))
        rows.append(
            (float(alpha), secret_rate_pair(params, split), nonsecret_rate_pair(params, split))
        )
    return rows


# =============================================================================
# Related closed forms
# =============================================================================


def equivalent_noise_increments(params: GaussianBceParams) -> tuple[float, float, float]:
    """Variances of N1, N2' and N3' in the physically degraded form
    Y1 = X + N1, Y2 = Y1 + N2', Z = Y2 + N3'."""
    return (
        params.sigma1_sq,
        params.sigma2_sq - params.sigma1_sq,
        params.sigma3_sq - params.sigma2_sq,
    )


def wiretap_secrecy_capacity(power: float, main_var: float, eve_var: float) -> float:
    """Gaussian wiretap secrecy capacity [C(P/main) - C(P/eve)]+."""
    if power < 0 or main_var <= 0 or eve_var <= 0:
        raise fail(ValidationError(field="wiretap", message="power >= 0, variances > 0"))
    return max(0.0, capacity(power / main_var) - capacity(power / eve_var))


def max_weighted_secret_sum(params: GaussianBceParams, mu: float) -> tuple[float, RatePoint]:
    """Split alpha maximizing R1 + mu*R2, with the rate pair it achieves."""
    if mu < 0:
        raise fail(ValidationError(field="mu", message=f"{mu} must be >= 0"))

    def negative(alpha: float) -> float:
        return -secret_rate_pair(params, GaussianSplit(alpha)).weighted(mu)

    result = minimize_scalar(
        negative, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10}
    )
    candidates = [0.0, 1.0, float(result.x)]
    best = max(candidates, key=lambda a: (-negative(a), -a))
    return best, secret_rate_pair(params, GaussianSplit(best))

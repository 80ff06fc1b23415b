"""
Broadcast strategy for the slowly fading wiretap channel.

The transmitter does not know the main-channel power gain S and treats the
receiver as a continuum of virtual users ordered by gain. A layer of power
rho(s) ds is decodable by every receiver with gain at least s; I(s) is the
power of all layers above s. The eavesdropper gain s' is fixed. The average
secrecy rate is

    1/2 int (1 - F(u)) [u/(1 + u I(u)) - s'/(1 + s' I(u))]^+ rho(u) du,

whose Euler-Lagrange condition the closed-form I(x) satisfies on the window
max(s', x0) <= x <= x1. That is a stationary point, not always the maximum:
``optimize_profile_numerical`` solves the same problem over finitely many
layers without using the closed form and reports how far it ends up above it.

Rates are reported in bits.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats
from scipy.optimize import bisect

from secrecy_regions.quadrature import DEFAULT_TOLERANCE, adaptive_simpson, integrate_piecewise
from secrecy_regions.simplex import maximize_on_simplex
from secrecy_regions.types import DomainError, SecrecyError, UsageError, ValidationError, fail

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
ScalarFn = Callable[[float], float]

TAIL_MASS = 1e-6
CONSISTENCY_TOLERANCE = 1e-6
CONSISTENCY_POINTS = (0.25, 0.5, 1.0, 2.0, 4.0)
ROOT_XTOL = 1e-14
DIFFERENCE_STEP = 1e-6


# =============================================================================
# Fading model
# =============================================================================


@dataclass(frozen=True, slots=True, eq=False)
class FadingSpec:
    """
    Main-channel gain distribution, eavesdropper gain and power budget.

    Named families keep their ``scipy.stats`` distribution for accurate tails
    and quantiles; user callables fall back to bisection on the cdf.
    """

    pdf: ScalarFn
    cdf: ScalarFn
    s_prime: float
    power: float
    family: str = "custom"
    shape: float | None = None
    distribution: Any = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.power) and self.power > 0):
            raise fail(ValidationError(field="power", message=f"{self.power} must be > 0"))
        if not (math.isfinite(self.s_prime) and self.s_prime >= 0):
            raise fail(ValidationError(field="s_prime", message=f"{self.s_prime} must be >= 0"))
        if abs(self.cdf(0.0)) > CONSISTENCY_TOLERANCE:
            raise fail(ValidationError(field="cdf", message="F(0) must be 0"))
        for point in CONSISTENCY_POINTS:
            mass = adaptive_simpson(self.pdf, 0.0, point).value
            gap = abs(mass - self.cdf(point))
            if not gap <= CONSISTENCY_TOLERANCE:
                raise fail(
                    ValidationError(
                        field="pdf",
                        message=f"integral of pdf differs from cdf by {gap:.3g} at {point}",
                    )
                )

    @classmethod
    def rayleigh(cls, s_prime: float, power: float) -> FadingSpec:
        """Rayleigh fading: exponentially distributed power gain with unit mean."""
        dist = stats.expon()
        return cls(_scalar(dist.pdf), _scalar(dist.cdf), s_prime, power, "rayleigh", None, dist)

    @classmethod
    def nakagami(cls, m: float, s_prime: float, power: float) -> FadingSpec:
        """Nakagami-m fading: gamma power gain with shape m and unit mean."""
        if not m >= 1.0:
            raise fail(ValidationError(field="m", message=f"{m} must be >= 1"))
        dist = stats.gamma(a=m, scale=1.0 / m)
        return cls(_scalar(dist.pdf), _scalar(dist.cdf), s_prime, power, "nakagami", m, dist)

    @classmethod
    def from_callables(
        cls, pdf: ScalarFn, cdf: ScalarFn, s_prime: float, power: float
    ) -> FadingSpec:
        return cls(pdf, cdf, s_prime, power)

    @property
    def is_rayleigh(self) -> bool:
        return self.family == "rayleigh"

    def survival(self, x: float) -> float:
        if self.distribution is not None:
            return float(self.distribution.sf(x))
        return 1.0 - self.cdf(x)

    def survival_array(self, xs: ArrayLike) -> FloatArray:
        points = np.asarray(xs, dtype=np.float64)
        if self.distribution is not None:
            return np.asarray(self.distribution.sf(points), dtype=np.float64)
        return np.array([1.0 - self.cdf(float(x)) for x in points])

    def tail_point(self, tail_mass: float = TAIL_MASS) -> float:
        """Smallest s with 1 - F(s) <= tail_mass."""
        if self.distribution is not None:
            return float(self.distribution.isf(tail_mass))
        hi = 1.0
        while self.survival(hi) > tail_mass:
            hi *= 2.0
            if hi > 1e12:
                raise fail(DomainError("tail point", hi, "survival does not reach the tail mass"))
        return float(bisect(lambda s: self.survival(s) - tail_mass, 0.0, hi, xtol=ROOT_XTOL))

    def quantiles(self, levels: ArrayLike) -> FloatArray:
        q = np.asarray(levels, dtype=np.float64)
        if self.distribution is not None:
            return np.asarray(self.distribution.ppf(q), dtype=np.float64)
        hi = self.tail_point(max(1e-15, 1.0 - float(q.max())) / 2.0)
        return np.array([0.0 if level <= 0 else self._invert(level, hi) for level in q])

    def _invert(self, level: float, hi: float) -> float:
        return float(bisect(lambda s: self.cdf(s) - level, 0.0, hi, xtol=ROOT_XTOL))

    def describe(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "shape": self.shape,
            "s_prime": self.s_prime,
            "power": self.power,
        }


def _scalar(fn: Callable[[Any], Any]) -> ScalarFn:
    return lambda x: float(fn(x))


# =============================================================================
# Closed form
# =============================================================================


@dataclass(frozen=True, slots=True)
class SupportWindow:
    """Gains carrying power in the closed-form solution: [start, end]."""

    start: float
    end: float
    x0: float
    x1: float

    @property
    def empty(self) -> bool:
        return not self.start < self.end

    def __contains__(self, x: float) -> bool:
        return not self.empty and self.start <= x <= self.end


def _closed_form(x: float, spec: FadingSpec) -> float:
    """Unclipped I(x); raises a domain error where the denominator is not positive."""
    s = spec.s_prime
    if spec.is_rayleigh:
        numerator = 1.0 + s - x
        denominator = x * x - s * x + s
    else:
        tail, density = spec.survival(x), spec.pdf(x)
        numerator = tail - (x - s) * density
        denominator = s * tail + x * (x - s) * density
    if not denominator > 0:
        raise fail(
            DomainError("optimal interference", x, f"denominator {denominator:.3g} is not positive")
        )
    return numerator / denominator


def rayleigh_endpoints(spec: FadingSpec) -> tuple[float, float]:
    """Closed-form (s0, s1) for Rayleigh fading, s1 = 1 + s'."""
    if not spec.is_rayleigh:
        raise fail(UsageError(f"rayleigh_endpoints needs Rayleigh fading, got {spec.family}"))
    p, s = spec.power, spec.s_prime
    root = math.sqrt(p * p * s * s + 2.0 * p * (1.0 - 2.0 * p) * s + 4.0 * p + 1.0)
    return (-1.0 + p * s + root) / (2.0 * p), 1.0 + s


def support_window(spec: FadingSpec, tail_mass: float = TAIL_MASS) -> SupportWindow:
    """
    The window max(s', x0) <= x <= x1.

    x1 is where the closed-form numerator vanishes and x0 solves I(x0) = P.
    Both have closed forms for Rayleigh fading; other families use bisection.
    """
    s = spec.s_prime
    if spec.is_rayleigh:
        x0, x1 = rayleigh_endpoints(spec)
        return SupportWindow(max(s, x0), x1, x0, x1)

    def numerator(x: float) -> float:
        return spec.survival(x) - (x - s) * spec.pdf(x)

    hi = max(spec.tail_point(tail_mass), 2.0 * s + 1.0)
    if numerator(hi) >= 0:
        raise fail(DomainError("x1", hi, "closed-form numerator has no sign change"))
    x1 = float(bisect(numerator, s, hi, xtol=ROOT_XTOL))

    lo = s if s > 0 else x1 * 1e-12
    if _closed_form(lo, spec) <= spec.power:
        x0 = lo
    else:
        x0 = float(bisect(lambda x: _closed_form(x, spec) - spec.power, lo, x1, xtol=ROOT_XTOL))
    logger.debug(f"Support window for {spec.family}: x0={x0:.12g}, x1={x1:.12g}")
    return SupportWindow(max(s, x0), x1, x0, x1)


def optimal_interference(
    x: float, spec: FadingSpec, window: SupportWindow | None = None
) -> float:
    """Closed-form I(x) clipped to [0, P] on the support window, 0 outside it."""
    if not x >= 0:
        raise fail(ValidationError(field="x", message=f"{x} must be >= 0"))
    window = window or support_window(spec)
    if x not in window:
        return 0.0
    return min(spec.power, max(0.0, _closed_form(x, spec)))


def rayleigh_power_density(
    s: float, spec: FadingSpec, window: SupportWindow | None = None
) -> float:
    """rho(s) = (-s^2 + 2(s'+1)s - s'^2) / (s^2 - s's + s')^2 on the window, else 0."""
    if not spec.is_rayleigh:
        raise fail(UsageError(f"rayleigh_power_density needs Rayleigh fading, got {spec.family}"))
    window = window or support_window(spec)
    if s not in window:
        return 0.0
    sp = spec.s_prime
    return (-s * s + 2.0 * (sp + 1.0) * s - sp * sp) / (s * s - sp * s + sp) ** 2


def power_density(s: float, spec: FadingSpec, window: SupportWindow | None = None) -> float:
    """-dI/ds of the closed form; central differences for non-Rayleigh families."""
    window = window or support_window(spec)
    if spec.is_rayleigh:
        return rayleigh_power_density(s, spec, window)
    if s not in window:
        return 0.0
    h = DIFFERENCE_STEP * (1.0 + s)
    lo, hi = max(window.start, s - h), min(window.end, s + h)
    return max(0.0, -(_closed_form(hi, spec) - _closed_form(lo, spec)) / (hi - lo))


# =============================================================================
# Power profiles
# =============================================================================


@dataclass(frozen=True, slots=True, eq=False)
class PowerProfile:
    """
    Layer power density rho and residual interference I sampled on a grid.

    Closed-form profiles also carry the exact functions, which the rate
    integrals use instead of interpolating the samples.
    """

    grid: FloatArray
    interference: FloatArray
    density: FloatArray
    interference_fn: ScalarFn | None = None
    density_fn: ScalarFn | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        grid = np.array(self.grid, dtype=np.float64)
        interference = np.array(self.interference, dtype=np.float64)
        density = np.array(self.density, dtype=np.float64)
        if not grid.shape == interference.shape == density.shape or grid.ndim != 1:
            raise fail(ValidationError(field="profile", message="grid, I and rho must align"))
        if grid.size:
            if np.any(np.diff(grid) <= 0) or grid[0] < 0:
                raise fail(ValidationError(field="grid", message="must be increasing from >= 0"))
            if np.any(np.diff(interference) > 1e-12 * max(1.0, float(interference[0]))):
                raise fail(ValidationError(field="interference", message="must be non-increasing"))
            if interference[-1] < -1e-12:
                raise fail(ValidationError(field="interference", message="must end >= 0"))
            if np.any(density < -1e-9):
                raise fail(ValidationError(field="density", message="must be non-negative"))
        for name, array in (("grid", grid), ("interference", interference), ("density", density)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @classmethod
    def empty(cls) -> PowerProfile:
        return cls(np.zeros(0), np.zeros(0), np.zeros(0))

    @property
    def is_empty(self) -> bool:
        return self.grid.size == 0

    @property
    def start(self) -> float:
        return float(self.grid[0])

    @property
    def end(self) -> float:
        return float(self.grid[-1])

    def interference_at(self, u: float) -> float:
        if self.interference_fn is not None:
            return self.interference_fn(u)
        return float(np.interp(u, self.grid, self.interference, right=0.0))

    def density_at(self, u: float) -> float:
        if self.density_fn is not None:
            return self.density_fn(u)
        return float(np.interp(u, self.grid, self.density, left=0.0, right=0.0))


def closed_form_profile(
    spec: FadingSpec, n_grid: int = 201, tail_mass: float = TAIL_MASS
) -> PowerProfile:
    """Closed-form I and rho sampled on ``n_grid`` points of the support window."""
    if n_grid < 2:
        raise fail(ValidationError(field="n_grid", message=f"{n_grid} must be >= 2"))
    window = support_window(spec, tail_mass)
    if window.empty:
        logger.info(f"Support window is empty (s'={spec.s_prime:g} >= x1={window.x1:g})")
        return PowerProfile.empty()
    grid = np.linspace(window.start, window.end, n_grid)
    return PowerProfile(
        grid=grid,
        interference=np.array([optimal_interference(float(x), spec, window) for x in grid]),
        density=np.array([power_density(float(x), spec, window) for x in grid]),
        interference_fn=lambda u: optimal_interference(u, spec, window),
        density_fn=lambda u: power_density(u, spec, window),
        metadata={"source": "closed-form", "x0": window.x0, "x1": window.x1, **spec.describe()},
    )


# =============================================================================
# Rates
# =============================================================================


def _check_budget(spec: FadingSpec, profile: PowerProfile) -> None:
    if not profile.is_empty and profile.interference[0] > spec.power + 1e-9:
        raise fail(
            ValidationError(
                field="profile",
                message=f"I(start)={profile.interference[0]:.12g} exceeds P={spec.power:g}",
            )
        )


def _secrecy_integrand(u: float, spec: FadingSpec, profile: PowerProfile) -> float:
    """[u/(1+uI) - s'/(1+s'I)]^+ rho(u), with the bracket as (u - s')/((1+uI)(1+s'I))."""
    rho = profile.density_at(u)
    if rho == 0.0 or u <= spec.s_prime:
        return 0.0
    i = profile.interference_at(u)
    return (u - spec.s_prime) / ((1.0 + u * i) * (1.0 + spec.s_prime * i)) * rho


def _breakpoints(profile: PowerProfile) -> tuple[float, ...]:
    if profile.density_fn is not None:
        return ()
    return tuple(float(x) for x in profile.grid)


def layer_rate(
    s: float,
    spec: FadingSpec,
    profile: PowerProfile,
    tolerance: float = DEFAULT_TOLERANCE,
) -> float:
    """Secrecy rate decodable at gain s: 1/2 int_0^s of the positive-part integrand."""
    _check_budget(spec, profile)
    if profile.is_empty or s <= spec.s_prime:
        return 0.0
    lo, hi = max(spec.s_prime, profile.start), min(s, profile.end)
    if hi <= lo:
        return 0.0
    result = integrate_piecewise(
        lambda u: _secrecy_integrand(u, spec, profile), lo, hi, _breakpoints(profile), tolerance
    )
    return max(0.0, 0.5 * result.value / math.log(2.0))


def average_rate(
    spec: FadingSpec, profile: PowerProfile, tolerance: float = DEFAULT_TOLERANCE
) -> float:
    """1/2 int (1 - F(u)) G(u) du in bits."""
    _check_budget(spec, profile)
    if profile.is_empty:
        return 0.0
    lo, hi = max(spec.s_prime, profile.start), profile.end
    if hi <= lo:
        return 0.0
    result = integrate_piecewise(
        lambda u: spec.survival(u) * _secrecy_integrand(u, spec, profile),
        lo,
        hi,
        _breakpoints(profile),
        tolerance,
    )
    return max(0.0, 0.5 * result.value / math.log(2.0))


def expected_layer_rate(
    spec: FadingSpec, profile: PowerProfile, tolerance: float = 1e-8
) -> float:
    """
    E_S[layer_rate(S)] by nested quadrature.

    Equals ``average_rate`` by integration by parts; the rate is flat above
    the profile's last gain, so that tail enters as (1 - F(end)) R(end).
    """
    if profile.is_empty:
        return 0.0
    lo, hi = max(spec.s_prime, profile.start), profile.end
    if hi <= lo:
        return 0.0
    inner = tolerance / 10.0
    body = integrate_piecewise(
        lambda s: spec.pdf(s) * layer_rate(s, spec, profile, inner),
        lo,
        hi,
        _breakpoints(profile),
        tolerance,
    )
    return body.value + spec.survival(hi) * layer_rate(hi, spec, profile, inner)


def finite_layer_rate(spec: FadingSpec, gains: ArrayLike, powers: ArrayLike) -> float:
    """
    Average secrecy rate of finitely many layers, in bits.

    Layer k sits at gain u_k with power p_k and is decoded by receivers with
    gain at least u_k, against interference T_{k+1} from the layers above it:
    1/2 (1 - F(u_k)) [log(1 + u_k T_k) - log(1 + u_k T_{k+1})
    - log(1 + s' T_k) + log(1 + s' T_{k+1})]^+.
    """
    u = np.asarray(gains, dtype=np.float64)
    p = np.asarray(powers, dtype=np.float64)
    if u.ndim != 1 or u.shape != p.shape or u.size == 0:
        raise fail(ValidationError(field="layers", message="gains and powers must align"))
    if np.any(np.diff(u) <= 0) or u[0] < 0:
        raise fail(ValidationError(field="gains", message="must be increasing from >= 0"))
    if np.any(p < 0):
        raise fail(ValidationError(field="powers", message="must be non-negative"))
    above = np.cumsum(p[::-1])[::-1]
    below = above - p
    secret = _log_gain(u, above, spec.s_prime) - _log_gain(u, below, spec.s_prime)
    terms = 0.5 * spec.survival_array(u) * np.maximum(secret, 0.0)
    return math.fsum(terms) / math.log(2.0)


def _log_gain(u: FloatArray, t: FloatArray, s_prime: float) -> FloatArray:
    return np.log1p(u * t) - np.log1p(s_prime * t)


discretized_objective = finite_layer_rate


# =============================================================================
# Numerical optimizer
# =============================================================================


@dataclass(frozen=True, slots=True, eq=False)
class OptimizedProfile:
    """Numerically optimized layering and its objective value (bits)."""

    profile: PowerProfile
    gains: FloatArray
    powers: FloatArray
    objective: float
    iterations: int
    converged: bool
    message: str


def layer_grid(
    spec: FadingSpec, n_layers: int, tail_mass: float = TAIL_MASS
) -> tuple[FloatArray, FloatArray]:
    """
    Cell edges and midpoint gains of ``n_layers`` equal-probability cells on
    [0, s_max], where 1 - F(s_max) = tail_mass.
    """
    top = 1.0 - tail_mass
    edges = spec.quantiles(np.linspace(0.0, top, n_layers + 1))
    edges[0] = 0.0
    return edges, 0.5 * (edges[:-1] + edges[1:])


def _objective(
    spec: FadingSpec, gains: FloatArray
) -> Callable[[FloatArray], tuple[float, FloatArray]]:
    """Discretized objective in bits and its gradient in the layer powers."""
    s = spec.s_prime
    weight = np.where(gains > s, 0.5 * spec.survival_array(gains), 0.0) / math.log(2.0)

    def slope(t: FloatArray) -> FloatArray:
        return gains / (1.0 + gains * t) - s / (1.0 + s * t)

    def evaluate(p: FloatArray) -> tuple[float, FloatArray]:
        above = np.cumsum(p[::-1])[::-1]
        below = above - p
        value = math.fsum(weight * (_log_gain(gains, above, s) - _log_gain(gains, below, s)))
        upper = np.cumsum(weight * slope(above))
        lower = np.concatenate(([0.0], np.cumsum(weight * slope(below))[:-1]))
        return value, upper - lower

    return evaluate


def optimize_profile_numerical(
    spec: FadingSpec,
    n_layers: int = 400,
    init: ArrayLike | None = None,
    tail_mass: float = TAIL_MASS,
    rel_tol: float = 1e-10,
    max_iter: int = 20000,
    gains: ArrayLike | None = None,
) -> OptimizedProfile:
    """
    Maximize the discretized objective over non-negative layer powers summing
    to P by projected ascent.

    Layers sit at the midpoints of ``n_layers`` equal-probability cells unless
    ``gains`` places them explicitly, in which case any positive count is
    allowed and ``n_layers`` is ignored. The closed form only supplies the
    default starting point and, afterwards, the ``closed_form_rate`` and
    ``closed_form_gap`` entries of the profile metadata.
    """
    if gains is None:
        if n_layers < 10:
            raise fail(ValidationError(field="n_layers", message=f"{n_layers} must be >= 10"))
        edges, layers = layer_grid(spec, n_layers, tail_mass)
    else:
        edges, layers = _explicit_grid(gains)
    n_layers = layers.size
    if init is None:
        start = _uniform_start(spec, layers, tail_mass)
    else:
        start = np.asarray(init, dtype=np.float64)
        if start.shape != layers.shape:
            raise fail(ValidationError(field="init", message=f"needs {n_layers} entries"))

    result = maximize_on_simplex(
        _objective(spec, layers), start, spec.power, rel_tol=rel_tol, max_iter=max_iter
    )
    if not result.converged:
        logger.warning(f"Layer optimizer did not converge: {result.message}")
    logger.info(
        f"Optimized {n_layers} layers: objective={result.value:.12g} bits "
        f"after {result.iterations} iterations"
    )

    closed = _closed_form_rate(spec, tail_mass)
    gap = None if closed is None else result.value - closed
    if gap is not None and gap > 0:
        logger.info(f"Numerical layering exceeds the closed form by {gap:.6g} bits")

    powers = result.x
    above = np.cumsum(powers[::-1])[::-1]
    profile = PowerProfile(
        grid=layers,
        interference=above - 0.5 * powers,
        density=powers / np.diff(edges),
        metadata={
            "source": "numerical",
            "n_layers": n_layers,
            "closed_form_rate": closed,
            "closed_form_gap": gap,
            **spec.describe(),
        },
    )
    return OptimizedProfile(
        profile=profile,
        gains=layers,
        powers=powers,
        objective=result.value,
        iterations=result.iterations,
        converged=result.converged,
        message=result.message,
    )


def _explicit_grid(gains: ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Cells around caller-chosen gains: midpoint edges, first edge at 0."""
    layers = np.asarray(gains, dtype=np.float64)
    if layers.ndim != 1 or layers.size == 0:
        raise fail(ValidationError(field="gains", message="must be a non-empty vector"))
    if np.any(np.diff(layers) <= 0) or layers[0] <= 0:
        raise fail(ValidationError(field="gains", message="must be increasing from > 0"))
    inner = 0.5 * (layers[:-1] + layers[1:])
    below = np.concatenate(([0.0], inner))
    top = 2.0 * layers[-1] - below[-1]
    return np.concatenate((below, [top])), layers


def _closed_form_rate(spec: FadingSpec, tail_mass: float) -> float | None:
    """Average rate of the closed-form profile, or None where it cannot be built."""
    try:
        return average_rate(spec, closed_form_profile(spec, tail_mass=tail_mass))
    except SecrecyError as exc:
        logger.debug(f"No closed-form reference rate: {exc}")
        return None


def _uniform_start(spec: FadingSpec, gains: FloatArray, tail_mass: float) -> FloatArray:
    """Uniform power over the layers in (s', x1], x1 estimated from the closed form."""
    try:
        end = support_window(spec, tail_mass).x1
    except SecrecyError:
        end = float(gains[-1])
    chosen = (gains > spec.s_prime) & (gains <= end)
    if not chosen.any():
        chosen = gains > spec.s_prime
    if not chosen.any():
        chosen = np.ones_like(gains, dtype=bool)
    return np.where(chosen, spec.power / chosen.sum(), 0.0)

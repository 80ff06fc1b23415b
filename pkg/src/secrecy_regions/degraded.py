"""
Secrecy capacity region of the degraded discrete memoryless BCE.

For an auxiliary decomposition P(u)P(x|u) the region is bounded by

    R1 <= I(X;Y1|U) - I(X;Z|U),    R2 <= I(U;Y2) - I(U;Z),

and the capacity region is the convex hull over all decompositions. The
search evaluates a deterministic simplex grid over the joint P(u, x), seeded
Dirichlet(1) samples, and a hill-climb from the best candidate for every
trade-off weight mu; the frontier of everything evaluated is returned with a
certificate decomposition per vertex.

Only the marginal kernels of the BCE are read.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from secrecy_regions.channel import (
    BceChannel,
    BceDegradedness,
    DiscreteChannel,
    Pmf,
    check_bce_degraded,
    entropy_along,
)
from secrecy_regions.region import RatePoint, RateRegion, region_from_cloud
from secrecy_regions.types import DimensionMismatch, ValidationError, fail

logger = logging.getLogger(__name__)

# Rate differences below this are round-off, not secrecy.
ROUNDOFF_FLOOR = 1e-13

FloatArray = NDArray[np.float64]


# =============================================================================
# Domain Types
# =============================================================================


@dataclass(frozen=True, slots=True, eq=False)
class AuxiliaryDecomposition:
    """P(u) and P(x|u) for the degraded region."""

    p_u: Pmf
    p_x_given_u: DiscreteChannel

    def __post_init__(self) -> None:
        if self.p_u.size != self.p_x_given_u.input_size:
            raise fail(
                DimensionMismatch(
                    "AuxiliaryDecomposition", self.p_u.size, self.p_x_given_u.input_size
                )
            )

    @property
    def joint(self) -> FloatArray:
        """P(u, x) as a |U| x |X| matrix."""
        return self.p_u.probs[:, None] * self.p_x_given_u.kernel

    @classmethod
    def from_joint(cls, joint: FloatArray) -> AuxiliaryDecomposition:
        """Split P(u, x); empty rows of U get a uniform conditional."""
        p_u = joint.sum(axis=1)
        conditional = np.full(joint.shape, 1.0 / joint.shape[1])
        used = p_u > 0
        conditional[used] = joint[used] / p_u[used, None]
        return cls(Pmf(p_u / p_u.sum()), DiscreteChannel(conditional))

    @classmethod
    def constant(cls, p_x: Pmf) -> AuxiliaryDecomposition:
        """U constant: a single cloud with input distribution p_x."""
        return cls(Pmf(np.ones(1)), DiscreteChannel(p_x.probs[None, :]))

    @classmethod
    def copy(cls, p_x: Pmf) -> AuxiliaryDecomposition:
        """U = X."""
        return cls(p_x, DiscreteChannel(np.eye(p_x.size)))

    def serialize(self) -> str:
        """Canonical JSON of the decomposition's file fields; orders tied candidates."""
        fields = {"p_u": self.p_u.probs.tolist(), "p_x_given_u": self.p_x_given_u.kernel.tolist()}
        return json.dumps(fields, sort_keys=True, separators=(",", ":"))

    @property
    def certificate_id(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:12]


@dataclass(frozen=True, slots=True)
class SearchConfig:
    """Knobs of the degraded-region search."""

    grid_resolution: int = 16
    random_samples: int = 2000
    refine_iters: int = 50
    mu_grid: tuple[float, ...] = (1.0, 1.5, 2.0, 4.0, 8.0)
    seed: int = 0
    u_cardinality: int | None = None
    max_grid_points: int = 250_000

    def __post_init__(self) -> None:
        if self.grid_resolution < 1:
            raise fail(ValidationError(field="grid_resolution", message="must be >= 1"))
        if self.random_samples < 0 or self.refine_iters < 0:
            raise fail(ValidationError(field="search", message="counts must be >= 0"))
        if not self.mu_grid or any(mu < 1.0 for mu in self.mu_grid):
            raise fail(ValidationError(field="mu_grid", message="every mu must be >= 1"))
        if self.u_cardinality is not None and self.u_cardinality < 1:
            raise fail(ValidationError(field="u_cardinality", message="must be >= 1"))


@dataclass(frozen=True, slots=True)
class SupportingPoint:
    """Best frontier vertex for one trade-off weight."""

    mu: float
    point: RatePoint
    certificate_id: str


@dataclass(frozen=True, slots=True)
class DegradedRegion:
    """Search outcome: frontier with certificates, per-mu support, verdict."""

    region: RateRegion
    supporting: tuple[SupportingPoint, ...]
    degradedness: BceDegradedness
    evaluated: int
    metadata: dict[str, object] = field(default_factory=dict)

    @property
    def certificates(self) -> tuple[AuxiliaryDecomposition, ...]:
        return tuple(self.region.parameters)


# =============================================================================
# Evaluation
# =============================================================================


def _receiver_terms(
    joint: FloatArray, h_u: FloatArray, kernel: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """Batched (I(X;Y|U), I(U;Y)) for joints P(u, x) of shape (N, U, X)."""
    p_x = joint.sum(axis=1)
    h_uy = entropy_along(joint @ kernel, axis=(1, 2))
    h_y = entropy_along(p_x @ kernel, axis=1)
    h_y_given_x = p_x @ entropy_along(kernel, axis=1)
    return h_uy - h_u - h_y_given_x, h_y - h_uy + h_u


def degraded_rates(bce: BceChannel, joints: FloatArray) -> FloatArray:
    """Rates (R1, R2) for a batch of joints P(u, x), shape (N, U, X) -> (N, 2)."""
    h_u = entropy_along(joints.sum(axis=2), axis=1)
    xy1_u, _ = _receiver_terms(joints, h_u, bce.y1.kernel)
    _, uy2 = _receiver_terms(joints, h_u, bce.y2.kernel)
    xz_u, uz = _receiver_terms(joints, h_u, bce.z.kernel)
    rates = np.stack([xy1_u - xz_u, uy2 - uz], axis=1)
    return np.where(rates < ROUNDOFF_FLOOR, 0.0, rates)


def evaluate_degraded_pair(bce: BceChannel, aux: AuxiliaryDecomposition) -> RatePoint:
    """(max(0, I(X;Y1|U) - I(X;Z|U)), max(0, I(U;Y2) - I(U;Z)))."""
    if aux.p_x_given_u.output_size != bce.input_size:
        raise fail(
            DimensionMismatch(
                "evaluate_degraded_pair", bce.input_size, aux.p_x_given_u.output_size
            )
        )
    r1, r2 = degraded_rates(bce, aux.joint[None])[0]
    return RatePoint(float(r1), float(r2))


# =============================================================================
# Search
# =============================================================================


def simplex_grid(dimension: int, resolution: int) -> FloatArray:
    """All points of the probability simplex with coordinates k / resolution."""
    rows = []
    for bars in itertools.combinations(range(resolution + dimension - 1), dimension - 1):
        edges = (-1, *bars, resolution + dimension - 1)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(dimension)])
    return np.array(rows, dtype=np.float64) / resolution


def _affordable_resolution(dimension: int, resolution: int, cap: int) -> int:
    while resolution > 1 and math.comb(resolution + dimension - 1, dimension - 1) > cap:
        resolution //= 2
    return resolution


def _hill_climb(
    bce: BceChannel,
    start: FloatArray,
    mu: float,
    step: float,
    passes: int,
) -> FloatArray:
    """Move mass between pairs of P(u, x) entries while R1 + mu R2 improves."""
    shape = start.shape
    current = start.ravel().copy()
    best = float((degraded_rates(bce, current.reshape(1, *shape)) @ (1.0, mu))[0])
    pairs = [(i, j) for i in range(current.size) for j in range(current.size) if i != j]
    for _ in range(passes):
        candidates = np.repeat(current[None, :], len(pairs), axis=0)
        for row, (i, j) in enumerate(pairs):
            move = min(step, current[j])
            candidates[row, i] += move
            candidates[row, j] -= move
        scores = degraded_rates(bce, candidates.reshape(-1, *shape)) @ (1.0, mu)
        winner = int(np.argmax(scores))
        if scores[winner] - best >= 1e-10:
            current, best = candidates[winner], float(scores[winner])
        else:
            step /= 2.0
            if step < 1e-12:
                break
    return current.reshape(shape)


def search_degraded_region(bce: BceChannel, config: SearchConfig) -> DegradedRegion:
    """
    Frontier of the degraded secrecy region with one certificate per vertex.

    A BCE that fails the degradedness check is still searched; the verdict is
    attached and the result is then only an inner-bound heuristic.
    """
    degradedness = check_bce_degraded(bce)
    if not degradedness.degraded:
        logger.warning(
            "BCE is not stochastically degraded "
            f"(Y1->Y2 residual {degradedness.legitimate.residual:.3g}, "
            f"Y2->Z residual {degradedness.eavesdropper.residual:.3g}); "
            "region is an inner-bound heuristic"
        )

    x_size = bce.input_size
    u_size = config.u_cardinality or x_size + 1
    dimension = u_size * x_size
    resolution = _affordable_resolution(dimension, config.grid_resolution, config.max_grid_points)
    if resolution != config.grid_resolution:
        logger.warning(f"Simplex grid coarsened from 1/{config.grid_resolution} to 1/{resolution}")

    rng = np.random.default_rng(config.seed)
    draws = rng.standard_exponential((config.random_samples, dimension))
    samples = draws / draws.sum(axis=1, keepdims=True)
    cloud = np.vstack([simplex_grid(dimension, resolution), samples]).reshape(-1, u_size, x_size)
    rates = degraded_rates(bce, cloud)
    logger.info(f"Evaluated {len(cloud)} decompositions (|U|={u_size}, grid 1/{resolution})")

    step = 1.0 / (2 * resolution)
    refined = []
    for mu in config.mu_grid:
        start = cloud[int(np.argmax(rates @ (1.0, mu)))]
        refined.append(_hill_climb(bce, start, mu, step, config.refine_iters))
    joints = np.concatenate([cloud, np.stack(refined)])
    all_rates = np.vstack([rates, degraded_rates(bce, np.stack(refined))])

    region = degraded_frontier(
        all_rates,
        joints,
        metadata={
            "u_cardinality": u_size,
            "u_cardinality_source": "user" if config.u_cardinality else "|X|+1",
            "grid_resolution": resolution,
            "random_samples": config.random_samples,
            "seed": config.seed,
        },
    )
    supporting = tuple(supporting_point(region, mu) for mu in config.mu_grid)
    for support in supporting:
        score = support.point.weighted(support.mu)
        logger.info(f"mu={support.mu:g}: R1+mu*R2={score:.6f} at {support.certificate_id}")
    return DegradedRegion(
        region=region,
        supporting=supporting,
        degradedness=degradedness,
        evaluated=len(joints),
        metadata=dict(region.metadata),
    )


class _LazyDecompositions:
    """Builds AuxiliaryDecomposition objects only for the indices asked for."""

    def __init__(self, joints: FloatArray) -> None:
        self._joints = joints

    def __getitem__(self, index: int) -> AuxiliaryDecomposition:
        return AuxiliaryDecomposition.from_joint(self._joints[index])

    def __len__(self) -> int:
        return len(self._joints)


class _LazySerializations:
    """Serialized decompositions, built only where coincident rates need ordering."""

    def __init__(self, joints: FloatArray) -> None:
        self._joints = joints

    def __getitem__(self, index: int) -> str:
        return AuxiliaryDecomposition.from_joint(self._joints[index]).serialize()


def degraded_frontier(
    rates: FloatArray, joints: FloatArray, metadata: dict[str, object] | None = None
) -> RateRegion:
    """
    Frontier of evaluated joints P(u, x) with their decompositions attached.

    Joints with identical rates are ordered by their serialized decomposition,
    so the certificate does not depend on evaluation order.
    """
    return region_from_cloud(
        rates,
        _LazyDecompositions(joints),
        keys=_LazySerializations(joints),
        metadata=dict(metadata or {}),
    )


def supporting_point(region: RateRegion, mu: float) -> SupportingPoint:
    """Vertex maximizing R1 + mu R2; ties go to the smallest serialized certificate."""
    best = region.max_weighted(mu)
    tied = [i for i, point in enumerate(region.points) if point.weighted(mu) == best]
    index = min(tied, key=lambda i: region.parameters[i].serialize())
    certificate: AuxiliaryDecomposition = region.parameters[index]
    return SupportingPoint(mu, region.points[index], certificate.certificate_id)


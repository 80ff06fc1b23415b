"""
Inner bound for the general BCE with a common message.

A decomposition P(u) P(v1, v2 | u) P(x | v1, v2) yields four bounds on
(R0, R1, R2). With m = min{I(U;Y1), I(U;Y2)} - I(U;Z):

    R0            <= m
    R0 + R1       <= I(V1;Y1|U) - I(V1;Z|U) + m
    R0 + R2       <= I(V2;Y2|U) - I(V2;Z|U) + m
    R0 + R1 + R2  <= I(V1;Y1|U) + I(V2;Y2|U) - I(V1,V2;Z|U) - I(V1;V2|U) + m

Without the eavesdropper terms the bounds reduce to Marton's region with a
common message; with user 2 removed, to the Csiszar-Korner secrecy rate.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from secrecy_regions.channel import (
    BceChannel,
    DiscreteChannel,
    Pmf,
    conditional_mutual_information_array,
    mutual_information_array,
)
from secrecy_regions.degraded import AuxiliaryDecomposition
from secrecy_regions.types import (
    BudgetExceeded,
    DimensionMismatch,
    ValidationError,
    fail,
)

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

MAX_AUXILIARY_PRODUCT = 64
DEFAULT_CAPS = (2, 2, 2)

# Axis positions in the per-receiver tensor P(u, v1, v2, x, y).
U, V1, V2, X, Y = 0, 1, 2, 3, 4


# =============================================================================
# Domain Types
# =============================================================================


@dataclass(frozen=True, slots=True, eq=False)
class InnerBoundDecomposition:
    """P(u), P(v1, v2 | u) as a U x V1 x V2 array, P(x | v1, v2) as V1 x V2 x X."""

    p_u: Pmf
    p_v1v2_given_u: FloatArray
    p_x_given_v1v2: FloatArray

    def __post_init__(self) -> None:
        v = np.array(self.p_v1v2_given_u, dtype=np.float64)
        x = np.array(self.p_x_given_v1v2, dtype=np.float64)
        if v.ndim != 3 or x.ndim != 3:
            raise fail(ValidationError(field="decomposition", message="kernels must be 3-D"))
        if v.shape[0] != self.p_u.size:
            raise fail(DimensionMismatch("InnerBoundDecomposition U", self.p_u.size, v.shape[0]))
        if v.shape[1:] != x.shape[:2]:
            raise fail(
                ValidationError(
                    field="decomposition",
                    message=f"V1 x V2 is {v.shape[1:]} in P(v1,v2|u), {x.shape[:2]} in P(x|v1,v2)",
                )
            )
        # Validated as row-stochastic kernels.
        DiscreteChannel(v.reshape(v.shape[0], -1))
        DiscreteChannel(x.reshape(-1, x.shape[2]))
        v.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "p_v1v2_given_u", v)
        object.__setattr__(self, "p_x_given_v1v2", x)

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        """(|U|, |V1|, |V2|, |X|)."""
        u, v1, v2 = self.p_v1v2_given_u.shape
        return u, v1, v2, self.p_x_given_v1v2.shape[2]

    @property
    def joint(self) -> FloatArray:
        """P(u, v1, v2, x)."""
        return np.einsum(
            "u,uab,abx->uabx", self.p_u.probs, self.p_v1v2_given_u, self.p_x_given_v1v2
        )

    @classmethod
    def from_auxiliary(cls, aux: AuxiliaryDecomposition) -> InnerBoundDecomposition:
        """Embed a degraded-region decomposition: V1 = X, V2 constant."""
        u_size, x_size = aux.p_x_given_u.kernel.shape
        v = aux.p_x_given_u.kernel.reshape(u_size, x_size, 1)
        x = np.eye(x_size).reshape(x_size, 1, x_size)
        return cls(aux.p_u, v, x)

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        caps: tuple[int, int, int],
        x_size: int,
        superposition: bool = False,
    ) -> InnerBoundDecomposition:
        """
        Dirichlet(1) draw of every factor. With ``superposition`` V2 is a copy
        of U, so |V2| = |U|.
        """
        u_size, v1_size, v2_size = caps
        p_u = _dirichlet(rng, (u_size,))
        if superposition:
            p_v1 = _dirichlet(rng, (u_size, v1_size))
            v = np.zeros((u_size, v1_size, u_size))
            v[np.arange(u_size), :, np.arange(u_size)] = p_v1
        else:
            v = _dirichlet(rng, (u_size, v1_size * v2_size)).reshape(u_size, v1_size, v2_size)
        x = _dirichlet(rng, (v.shape[1], v.shape[2], x_size))
        return cls(Pmf(p_u), v, x)


def _dirichlet(rng: np.random.Generator, shape: tuple[int, ...]) -> FloatArray:
    draws = rng.standard_exponential(shape)
    return draws / draws.sum(axis=-1, keepdims=True)


@dataclass(frozen=True, slots=True)
class RateTriple:
    """(R0, R1, R2) in bits per channel use."""

    r0: float
    r1: float
    r2: float

    def __post_init__(self) -> None:
        values = (self.r0, self.r1, self.r2)
        if any(math.isnan(v) or v < 0 for v in values):
            raise fail(
                ValidationError(field="rates", message=f"({self.r0}, {self.r1}, {self.r2})")
            )


@dataclass(frozen=True, slots=True)
class InnerBounds:
    """Right-hand sides of the four inequalities, clipped at 0, plus raw values."""

    b0: float
    b1: float
    b2: float
    b12: float
    raw: tuple[float, float, float, float]

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.b0, self.b1, self.b2, self.b12

    @classmethod
    def clipped(cls, b0: float, b1: float, b2: float, b12: float) -> InnerBounds:
        return cls(max(0.0, b0), max(0.0, b1), max(0.0, b2), max(0.0, b12), (b0, b1, b2, b12))


# =============================================================================
# Evaluation
# =============================================================================


@dataclass(frozen=True, slots=True)
class _Terms:
    v1_y1: float
    v2_y2: float
    v1_z: float
    v2_z: float
    v1v2_z: float
    v1_v2: float
    u_y1: float
    u_y2: float
    u_z: float


def _receiver_tensor(joint: FloatArray, channel: DiscreteChannel) -> FloatArray:
    return joint[..., None] * channel.kernel


def _terms(bce: BceChannel, dec: InnerBoundDecomposition) -> _Terms:
    if dec.sizes[3] != bce.input_size:
        raise fail(DimensionMismatch("evaluate_inner_bound", bce.input_size, dec.sizes[3]))
    joint = dec.joint
    t1 = _receiver_tensor(joint, bce.y1)
    t2 = _receiver_tensor(joint, bce.y2)
    tz = _receiver_tensor(joint, bce.z)
    return _Terms(
        v1_y1=conditional_mutual_information_array(t1, [V1], [Y], [U]),
        v2_y2=conditional_mutual_information_array(t2, [V2], [Y], [U]),
        v1_z=conditional_mutual_information_array(tz, [V1], [Y], [U]),
        v2_z=conditional_mutual_information_array(tz, [V2], [Y], [U]),
        v1v2_z=conditional_mutual_information_array(tz, [V1, V2], [Y], [U]),
        v1_v2=conditional_mutual_information_array(joint, [V1], [V2], [U]),
        u_y1=mutual_information_array(t1, [U], [Y]),
        u_y2=mutual_information_array(t2, [U], [Y]),
        u_z=mutual_information_array(tz, [U], [Y]),
    )


def evaluate_inner_bound(bce: BceChannel, dec: InnerBoundDecomposition) -> InnerBounds:
    """The four bounds (B0, B1, B2, B12); reads only the marginal kernels."""
    t = _terms(bce, dec)
    m = min(t.u_y1, t.u_y2) - t.u_z
    bounds = InnerBounds.clipped(
        m,
        t.v1_y1 - t.v1_z + m,
        t.v2_y2 - t.v2_z + m,
        t.v1_y1 + t.v2_y2 - t.v1v2_z - t.v1_v2 + m,
    )
    if any(value < 0 for value in bounds.raw):
        logger.debug(f"Negative raw inner bounds clipped: {bounds.raw}")
    return bounds


def marton_bounds(bce: BceChannel, dec: InnerBoundDecomposition) -> InnerBounds:
    """The same four bounds with every eavesdropper term removed."""
    t = _terms(bce, dec)
    m = min(t.u_y1, t.u_y2)
    return InnerBounds.clipped(
        m,
        t.v1_y1 + m,
        t.v2_y2 + m,
        t.v1_y1 + t.v2_y2 - t.v1_v2 + m,
    )


def csiszar_korner_rate(bce: BceChannel, dec: InnerBoundDecomposition) -> float:
    """Single-user secrecy rate [I(V1;Y1) - I(V1;Z)]^+ of the decomposition."""
    if dec.sizes[3] != bce.input_size:
        raise fail(DimensionMismatch("csiszar_korner_rate", bce.input_size, dec.sizes[3]))
    joint = dec.joint
    main = mutual_information_array(_receiver_tensor(joint, bce.y1), [V1], [Y])
    tap = mutual_information_array(_receiver_tensor(joint, bce.z), [V1], [Y])
    return max(0.0, main - tap)


def membership(
    bce: BceChannel,
    dec: InnerBoundDecomposition,
    triple: RateTriple,
    tolerance: float = 0.0,
) -> bool:
    """Whether ``triple`` satisfies all four inequalities."""
    return bounds_contain(evaluate_inner_bound(bce, dec), triple, tolerance)


def bounds_contain(bounds: InnerBounds, triple: RateTriple, tolerance: float = 0.0) -> bool:
    r0, r1, r2 = triple.r0, triple.r1, triple.r2
    return (
        r0 <= bounds.b0 + tolerance
        and r0 + r1 <= bounds.b1 + tolerance
        and r0 + r2 <= bounds.b2 + tolerance
        and r0 + r1 + r2 <= bounds.b12 + tolerance
    )


def corner_points(bounds: InnerBounds) -> list[RateTriple]:
    """
    Maximal vertices of the polytope cut out by the bounds, for R0 = 0 and
    for R0 at its largest feasible value.
    """
    top = min(bounds.as_tuple())
    corners: list[RateTriple] = []
    for r0 in dict.fromkeys((0.0, top)):
        a = max(0.0, bounds.b1 - r0)
        b = max(0.0, bounds.b2 - r0)
        c = max(0.0, bounds.b12 - r0)
        first = min(a, c)
        second = min(b, c)
        for r1, r2 in ((first, min(b, c - first)), (min(a, c - second), second)):
            triple = RateTriple(r0, max(0.0, r1), max(0.0, r2))
            if triple not in corners:
                corners.append(triple)
    return corners


def sample_decompositions(
    bce: BceChannel,
    caps: tuple[int, int, int] = DEFAULT_CAPS,
    samples: int = 5000,
    seed: int = 0,
    superposition: bool = False,
) -> Iterator[InnerBoundDecomposition]:
    """Seeded random decompositions within the alphabet caps."""
    if len(caps) != 3 or min(caps) < 2:
        raise fail(ValidationError(field="caps", message=f"{caps}: need three caps >= 2"))
    u_size, v1_size, v2_size = caps
    effective = u_size * v1_size * (u_size if superposition else v2_size)
    if effective > MAX_AUXILIARY_PRODUCT:
        raise fail(BudgetExceeded("|U||V1||V2|", effective, MAX_AUXILIARY_PRODUCT))
    if samples < 0:
        raise fail(ValidationError(field="samples", message=f"{samples} must be >= 0"))
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        yield InnerBoundDecomposition.random(rng, caps, bce.input_size, superposition)


def sample_inner_region(
    bce: BceChannel,
    caps: tuple[int, int, int] = DEFAULT_CAPS,
    samples: int = 5000,
    seed: int = 0,
    superposition: bool = False,
) -> tuple[RateTriple, ...]:
    """
    Union over sampled decompositions of the corner triples of their bounds,
    deduplicated in sampling order.
    """
    triples: dict[RateTriple, None] = {}
    for dec in sample_decompositions(bce, caps, samples, seed, superposition):
        for triple in corner_points(evaluate_inner_bound(bce, dec)):
            triples.setdefault(triple)
    logger.info(f"Sampled {samples} decompositions, {len(triples)} distinct corner triples")
    return tuple(triples)

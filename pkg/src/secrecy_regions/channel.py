"""
Finite-alphabet probability objects and information measures.

Provides validated pmfs, channel kernels and joint tensors, entropy and
(conditional) mutual information in bits, channel cascades, and the
stochastic-degradedness feasibility check used to decide whether a broadcast
channel with an eavesdropper (BCE) admits the degraded capacity region.

All values are immutable after construction and every function is pure.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import nnls

from secrecy_regions.types import DimensionMismatch, UsageError, ValidationError, fail

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-12
DEGRADATION_TOLERANCE = 1e-9

FloatArray = NDArray[np.float64]


def _frozen_array(values: ArrayLike) -> FloatArray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


def _check_probabilities(array: FloatArray, what: str, tolerance: float) -> FloatArray:
    """Finite entries no lower than -tolerance; round-off negatives come back as 0."""
    if array.size == 0:
        raise fail(ValidationError(field=what, message="alphabet must not be empty"))
    if not np.all(np.isfinite(array)):
        raise fail(ValidationError(field=what, message="entries must be finite"))
    lowest = float(array.min())
    if lowest < -tolerance:
        raise fail(
            ValidationError(field=what, message=f"entries must be non-negative, found {lowest!r}")
        )
    if lowest < 0:
        return _frozen_array(np.maximum(array, 0.0))
    return array


# =============================================================================
# Domain Types
# =============================================================================


@dataclass(frozen=True, slots=True, eq=False)
class Pmf:
    """Probability mass function over a finite alphabet."""

    probs: FloatArray
    tolerance: float = PROBABILITY_TOLERANCE

    def __post_init__(self) -> None:
        probs = _frozen_array(self.probs)
        if probs.ndim != 1:
            raise fail(ValidationError(field="pmf", message="must be a vector"))
        probs = _check_probabilities(probs, "pmf", self.tolerance)
        total = float(probs.sum())
        if abs(total - 1.0) > self.tolerance:
            raise fail(ValidationError(field="pmf", message=f"sums to {total!r}, not 1"))
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return int(self.probs.shape[0])

    @classmethod
    def uniform(cls, size: int) -> Pmf:
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point(cls, size: int, index: int) -> Pmf:
        probs = np.zeros(size)
        probs[index] = 1.0
        return cls(probs)


@dataclass(frozen=True, slots=True, eq=False)
class DiscreteChannel:
    """Row-stochastic transition kernel; rows are inputs, columns outputs."""

    kernel: FloatArray
    tolerance: float = PROBABILITY_TOLERANCE

    def __post_init__(self) -> None:
        kernel = _frozen_array(self.kernel)
        if kernel.ndim != 2:
            raise fail(ValidationError(field="kernel", message="must be a matrix"))
        kernel = _check_probabilities(kernel, "kernel", self.tolerance)
        row_sums = kernel.sum(axis=1)
        worst = float(np.max(np.abs(row_sums - 1.0)))
        if worst > self.tolerance:
            raise fail(
                ValidationError(field="kernel", message=f"row sums deviate from 1 by {worst:.3g}")
            )
        object.__setattr__(self, "kernel", kernel)

    @property
    def input_size(self) -> int:
        return int(self.kernel.shape[0])

    @property
    def output_size(self) -> int:
        return int(self.kernel.shape[1])

    def output_pmf(self, p_input: Pmf) -> Pmf:
        if p_input.size != self.input_size:
            raise fail(DimensionMismatch("output_pmf", self.input_size, p_input.size))
        return Pmf(p_input.probs @ self.kernel)


@dataclass(frozen=True, slots=True, eq=False)
class JointDistribution:
    """Dense probability tensor with one named axis per variable."""

    probs: FloatArray
    axes: tuple[str, ...]
    tolerance: float = PROBABILITY_TOLERANCE

    def __post_init__(self) -> None:
        probs = _frozen_array(self.probs)
        axes = tuple(self.axes)
        if probs.ndim != len(axes):
            raise fail(
                ValidationError(
                    field="joint", message=f"{probs.ndim} dimensions but {len(axes)} axis names"
                )
            )
        if len(set(axes)) != len(axes):
            raise fail(ValidationError(field="joint", message="axis names must be unique"))
        probs = _check_probabilities(probs, "joint", self.tolerance)
        total = float(probs.sum())
        if abs(total - 1.0) > self.tolerance:
            raise fail(ValidationError(field="joint", message=f"total mass {total!r}, not 1"))
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "axes", axes)

    def axis_index(self, names: Sequence[str]) -> tuple[int, ...]:
        missing = [name for name in names if name not in self.axes]
        if missing:
            raise fail(UsageError(f"unknown axes {missing}; joint has {list(self.axes)}"))
        return tuple(self.axes.index(name) for name in names)

    def marginal(self, names: Sequence[str]) -> FloatArray:
        """Marginal tensor over ``names``, with axes in the order given."""
        index = self.axis_index(names)
        others = tuple(i for i in range(len(self.axes)) if i not in index)
        reduced = self.probs.sum(axis=others)
        kept = sorted(index)
        return np.transpose(reduced, [kept.index(i) for i in index])


@dataclass(frozen=True, slots=True, eq=False)
class BceChannel:
    """
    Broadcast channel with an eavesdropper.

    Only the marginal kernels P(y1|x), P(y2|x), P(z|x) are used by the
    computations in this package; the optional full joint P(y1,y2,z|x) is
    validated against them and otherwise carried along.
    """

    y1: DiscreteChannel
    y2: DiscreteChannel
    z: DiscreteChannel
    joint: FloatArray | None = None
    tolerance: float = PROBABILITY_TOLERANCE

    def __post_init__(self) -> None:
        size = self.y1.input_size
        for name, channel in (("y2", self.y2), ("z", self.z)):
            if channel.input_size != size:
                raise fail(DimensionMismatch(f"BCE {name} kernel", size, channel.input_size))
        if self.joint is None:
            return
        joint = _frozen_array(self.joint)
        expected = (size, self.y1.output_size, self.y2.output_size, self.z.output_size)
        if joint.shape != expected:
            raise fail(
                ValidationError(field="joint", message=f"shape {joint.shape}, expected {expected}")
            )
        joint = _check_probabilities(joint, "joint", self.tolerance)
        for name, axes, channel in (
            ("y1", (2, 3), self.y1),
            ("y2", (1, 3), self.y2),
            ("z", (1, 2), self.z),
        ):
            deviation = float(np.max(np.abs(joint.sum(axis=axes) - channel.kernel)))
            if deviation > self.tolerance:
                raise fail(
                    ValidationError(
                        field="joint",
                        message=f"marginal for {name} deviates by {deviation:.3g}",
                    )
                )
        object.__setattr__(self, "joint", joint)

    @property
    def input_size(self) -> int:
        return self.y1.input_size

    @classmethod
    def from_joint(cls, joint: ArrayLike) -> BceChannel:
        """Build a BCE from P(y1,y2,z|x) indexed [x][y1][y2][z]."""
        array = np.asarray(joint, dtype=np.float64)
        if array.ndim != 4:
            raise fail(ValidationError(field="joint", message="must be indexed [x][y1][y2][z]"))
        return cls(
            y1=DiscreteChannel(array.sum(axis=(2, 3))),
            y2=DiscreteChannel(array.sum(axis=(1, 3))),
            z=DiscreteChannel(array.sum(axis=(1, 2))),
            joint=array,
        )

    @classmethod
    def conditionally_independent(
        cls, y1: DiscreteChannel, y2: DiscreteChannel, z: DiscreteChannel
    ) -> BceChannel:
        """BCE whose joint is the product of the marginals given x."""
        joint = np.einsum("xa,xb,xc->xabc", y1.kernel, y2.kernel, z.kernel)
        return cls(y1=y1, y2=y2, z=z, joint=joint)


@dataclass(frozen=True, slots=True, eq=False)
class DegradationVerdict:
    """Outcome of a stochastic-degradedness feasibility check."""

    feasible: bool
    kernel: FloatArray
    residual: float
    max_entry_error: float = field(default=0.0)


@dataclass(frozen=True, slots=True, eq=False)
class BceDegradedness:
    """Degradedness of the chain X -> Y1 -> Y2 -> Z in marginal distribution."""

    legitimate: DegradationVerdict
    eavesdropper: DegradationVerdict

    @property
    def degraded(self) -> bool:
        return self.legitimate.feasible and self.eavesdropper.feasible

    @property
    def legitimate_only(self) -> bool:
        return self.legitimate.feasible and not self.eavesdropper.feasible


# =============================================================================
# Constructors
# =============================================================================


def binary_symmetric(crossover: float) -> DiscreteChannel:
    """Binary symmetric channel with the given crossover probability."""
    if not 0.0 <= crossover <= 1.0:
        raise fail(ValidationError(field="crossover", message=f"{crossover} not in [0, 1]"))
    return DiscreteChannel(np.array([[1 - crossover, crossover], [crossover, 1 - crossover]]))


def identity_channel(size: int) -> DiscreteChannel:
    return DiscreteChannel(np.eye(size))


def uniform_noise_channel(input_size: int, output_size: int) -> DiscreteChannel:
    """Output uniformly distributed and independent of the input."""
    return DiscreteChannel(np.full((input_size, output_size), 1.0 / output_size))


def joint_from_kernels(
    p_input: Pmf, kernel: DiscreteChannel, axes: tuple[str, str] = ("x", "y")
) -> JointDistribution:
    """Joint P(x, y) = P(x) P(y|x)."""
    if p_input.size != kernel.input_size:
        raise fail(DimensionMismatch("joint_from_kernels", kernel.input_size, p_input.size))
    return JointDistribution(p_input.probs[:, None] * kernel.kernel, axes)


# =============================================================================
# Information Measures (bits)
# =============================================================================


def entropy_bits(probs: FloatArray) -> float:
    """Entropy of an unvalidated non-negative array, 0 log 0 := 0."""
    support = probs[probs > 0]
    return float(-np.sum(support * np.log2(support)))


def entropy_along(probs: FloatArray, axis: int | tuple[int, ...]) -> FloatArray:
    """Batched entropy: -sum p log2 p over ``axis``, 0 log 0 := 0."""
    positive = probs > 0
    logs = np.log2(np.where(positive, probs, 1.0))
    return -np.sum(np.where(positive, probs * logs, 0.0), axis=axis)


def entropy(p: Pmf | ArrayLike) -> float:
    """Entropy H(p) in bits. Non-Pmf input is validated first."""
    pmf = p if isinstance(p, Pmf) else Pmf(np.asarray(p, dtype=np.float64))
    return max(0.0, entropy_bits(pmf.probs))


def mutual_information_array(
    probs: FloatArray, axes_a: Sequence[int], axes_b: Sequence[int]
) -> float:
    """I(A;B) over positional axes of a joint tensor, restricted to the support."""
    keep = set(axes_a) | set(axes_b)
    others = tuple(i for i in range(probs.ndim) if i not in keep)
    p_ab = probs.sum(axis=others, keepdims=True) if others else probs
    p_a = p_ab.sum(axis=tuple(axes_b), keepdims=True)
    p_b = p_ab.sum(axis=tuple(axes_a), keepdims=True)
    outer = p_a * p_b
    mask = p_ab > 0
    value = float(np.sum(p_ab[mask] * np.log2(p_ab[mask] / outer[mask])))
    return max(0.0, value)


def conditional_mutual_information_array(
    probs: FloatArray,
    axes_a: Sequence[int],
    axes_b: Sequence[int],
    axes_c: Sequence[int],
) -> float:
    """I(A;B|C) over positional axes; zero-mass conditioning slices contribute 0."""
    if not axes_c:
        return mutual_information_array(probs, axes_a, axes_b)
    keep = set(axes_a) | set(axes_b) | set(axes_c)
    others = tuple(i for i in range(probs.ndim) if i not in keep)
    p_abc = probs.sum(axis=others, keepdims=True) if others else probs
    p_ac = p_abc.sum(axis=tuple(axes_b), keepdims=True)
    p_bc = p_abc.sum(axis=tuple(axes_a), keepdims=True)
    p_c = p_ac.sum(axis=tuple(axes_a), keepdims=True)
    numerator = p_abc * p_c
    denominator = p_ac * p_bc
    mask = p_abc > 0
    value = float(np.sum(p_abc[mask] * np.log2(numerator[mask] / denominator[mask])))
    return max(0.0, value)


def _disjoint(*groups: Sequence[str]) -> None:
    seen: set[str] = set()
    for group in groups:
        if not group:
            raise fail(UsageError("axis sets must be non-empty"))
        overlap = seen & set(group)
        if overlap:
            raise fail(UsageError(f"axis sets overlap on {sorted(overlap)}"))
        seen |= set(group)


def mutual_information(
    joint: JointDistribution, axes_a: Sequence[str], axes_b: Sequence[str]
) -> float:
    """I(A;B) in bits between two disjoint groups of named axes."""
    _disjoint(axes_a, axes_b)
    return mutual_information_array(
        joint.probs, joint.axis_index(axes_a), joint.axis_index(axes_b)
    )


def conditional_mutual_information(
    joint: JointDistribution,
    axes_a: Sequence[str],
    axes_b: Sequence[str],
    axes_c: Sequence[str],
) -> float:
    """I(A;B|C) in bits between pairwise disjoint groups of named axes."""
    _disjoint(axes_a, axes_b, axes_c)
    return conditional_mutual_information_array(
        joint.probs,
        joint.axis_index(axes_a),
        joint.axis_index(axes_b),
        joint.axis_index(axes_c),
    )


# =============================================================================
# Channel Composition and Degradedness
# =============================================================================


def compose(first: DiscreteChannel, second: DiscreteChannel) -> DiscreteChannel:
    """Cascade ``first`` then ``second``: kernel product."""
    if first.output_size != second.input_size:
        raise fail(DimensionMismatch("compose", first.output_size, second.input_size))
    return DiscreteChannel(first.kernel @ second.kernel)


def check_stochastically_degraded(
    strong: DiscreteChannel,
    weak: DiscreteChannel,
    tolerance: float = DEGRADATION_TOLERANCE,
) -> DegradationVerdict:
    """
    Look for a row-stochastic D with weak = strong @ D.

    Solved as one non-negative least-squares system over vec(D), with the
    cascade equations and the row-sum equations stacked. Feasible when the
    residual norm is at most ``tolerance``; otherwise the residual is the
    infeasibility certificate.
    """
    if strong.input_size != weak.input_size:
        raise fail(
            DimensionMismatch("check_stochastically_degraded", strong.input_size, weak.input_size)
        )
    n_mid, n_out = strong.output_size, weak.output_size
    cascade = np.kron(strong.kernel, np.eye(n_out))
    row_sums = np.kron(np.eye(n_mid), np.ones((1, n_out)))
    system = np.vstack([cascade, row_sums])
    target = np.concatenate([weak.kernel.ravel(), np.ones(n_mid)])

    solution, residual = nnls(system, target)
    kernel = solution.reshape(n_mid, n_out)
    max_entry_error = float(np.max(np.abs(strong.kernel @ kernel - weak.kernel)))
    feasible = residual <= tolerance
    logger.debug(f"Degradedness check: residual={residual:.3g}, feasible={feasible}")
    return DegradationVerdict(
        feasible=bool(feasible),
        kernel=_frozen_array(kernel),
        residual=float(residual),
        max_entry_error=max_entry_error,
    )


def check_bce_degraded(
    bce: BceChannel, tolerance: float = DEGRADATION_TOLERANCE
) -> BceDegradedness:
    """Check Y1 -> Y2 and Y2 -> Z stochastic degradation of a BCE."""
    return BceDegradedness(
        legitimate=check_stochastically_degraded(bce.y1, bce.y2, tolerance),
        eavesdropper=check_stochastically_degraded(bce.y2, bce.z, tolerance),
    )

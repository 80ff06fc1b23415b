"""
Rate points, rate regions and the upper-right convex frontier.

A region is represented by the Pareto frontier of its convex hull: vertices
sorted by R2 ascending with R1 non-increasing. Rates below the frontier are
achievable by rate reduction and convex combinations by time sharing, so no
explicit time-sharing variable is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Protocol, TypeVar

import numpy as np
from numpy.typing import NDArray

from secrecy_regions.types import ValidationError, fail

T_co = TypeVar("T_co", covariant=True)


class Indexed(Protocol[T_co]):
    """Anything readable by integer index, such as a list or a lazy view."""

    def __getitem__(self, index: int, /) -> T_co: ...


@dataclass(frozen=True, slots=True)
class RatePoint:
    """Rate pair in bits per channel use."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        if self.r1 < 0 or self.r2 < 0 or math.isnan(self.r1) or math.isnan(self.r2):
            raise fail(ValidationError(field="rate", message=f"({self.r1}, {self.r2})"))

    def weighted(self, mu: float) -> float:
        return self.r1 + mu * self.r2


@dataclass(frozen=True, slots=True)
class RateRegion:
    """Upper-right frontier plus the generating parameter of each vertex."""

    points: tuple[RatePoint, ...]
    parameters: tuple[Any, ...] = ()
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def max_r1(self) -> float:
        return max((p.r1 for p in self.points), default=0.0)

    @property
    def max_r2(self) -> float:
        return max((p.r2 for p in self.points), default=0.0)

    def max_weighted(self, mu: float) -> float:
        return max((p.weighted(mu) for p in self.points), default=0.0)

    def contains(self, point: RatePoint, tolerance: float = 1e-9) -> bool:
        """Whether ``point`` lies in the down-closed convex hull of the frontier."""
        if not self.points:
            return point.r1 <= tolerance and point.r2 <= tolerance
        if point.r1 > self.max_r1 + tolerance or point.r2 > self.max_r2 + tolerance:
            return False
        for a, b in zip(self.points, self.points[1:]):
            normal = (b.r2 - a.r2, a.r1 - b.r1)
            scale = math.hypot(*normal)
            if scale == 0.0:
                continue
            lhs = normal[0] * point.r1 + normal[1] * point.r2
            rhs = normal[0] * a.r1 + normal[1] * a.r2
            if lhs > rhs + tolerance * scale:
                return False
        return True

    def includes(self, other: RateRegion, tolerance: float = 1e-9) -> bool:
        """Set inclusion: every vertex of ``other`` is inside this region."""
        return all(self.contains(p, tolerance) for p in other.points)


def _cross(o: NDArray[np.float64], a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def _precedes(index: int, other: int, keys: Indexed[str] | None) -> bool:
    """Key order when keys are given, evaluation order otherwise; keys are read lazily."""
    if keys is None:
        return index < other
    return keys[index] < keys[other]


def upper_frontier(points: NDArray[np.float64], keys: Indexed[str] | None = None) -> list[int]:
    """
    Indices of the upper-right convex frontier of a cloud of (R1, R2) points.

    Monotone chain over the points sorted by R1: the upper hull runs from the
    leftmost to the rightmost point, and its part from the highest-R2 vertex
    onward is the frontier. Collinear interior points are dropped. Among
    coincident points the one with the smallest key wins. The result is
    ordered by R2 ascending.
    """
    if len(points) == 0:
        return []
    best: dict[tuple[float, float], int] = {}
    for index, (r1, r2) in enumerate(points):
        coordinate = (float(r1), float(r2))
        current = best.get(coordinate)
        if current is None or _precedes(index, current, keys):
            best[coordinate] = index

    candidates = sorted(best.items(), key=lambda item: item[0])
    hull: list[int] = []
    for _, index in candidates:
        while len(hull) >= 2 and _cross(points[hull[-2]], points[hull[-1]], points[index]) >= 0:
            hull.pop()
        hull.append(index)

    top = max(range(len(hull)), key=lambda i: (points[hull[i]][1], points[hull[i]][0]))
    return list(reversed(hull[top:]))


def region_from_cloud(
    points: NDArray[np.float64],
    parameters: Indexed[Any],
    keys: Indexed[str] | None = None,
    metadata: dict[str, Any] | None = None,
) -> RateRegion:
    """Frontier region of a point cloud, keeping each vertex's parameter."""
    indices = upper_frontier(points, keys)
    return RateRegion(
        points=tuple(RatePoint(float(points[i][0]), float(points[i][1])) for i in indices),
        parameters=tuple(parameters[i] for i in indices),
        metadata=dict(metadata or {}),
    )

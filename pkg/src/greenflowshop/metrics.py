"""Dominance filtering, normalization, and front quality indicators.

Indicators operate on plain (objective1, objective2) pairs in normalized
space so that means across instances are comparable.  GD measures the
distance from an obtained front to a reference front (convergence, smaller
is better); IGD measures coverage of the reference front (overall quality,
smaller is better); spread is the diagonal extent of the obtained front
(larger is better here).
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

Point = tuple[float, float]
Bounds = tuple[tuple[float, float], tuple[float, float]]

_VARIANTS = ("standard", "swapped")


def dominates(a: Point, b: Point) -> bool:
    """Weak dominance with one strict improvement, minimizing both."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def nondominated_filter(points: Iterable[Point]) -> list[Point]:
    """Non-dominated subset with objective duplicates collapsed, sorted."""
    ordered = sorted(set(points))
    front: list[Point] = []
    best_second = math.inf
    for point in ordered:
        if point[1] < best_second:
            front.append(point)
            best_second = point[1]
    return front


def bounds_of(points: Sequence[Point]) -> Bounds:
    """Per-objective (min, max) of a point set."""
    if not points:
        raise ValueError("cannot take bounds of an empty point set")
    first = [p[0] for p in points]
    second = [p[1] for p in points]
    return (min(first), max(first)), (min(second), max(second))


def normalize(points: Sequence[Point], bounds: Bounds) -> list[Point]:
    """Affine map sending the bounds onto [0, 1] per objective.

    A degenerate objective (max == min) maps to 0.  Points outside the
    bounds map outside [0, 1]; no clamping, so the map stays invertible.
    """
    (lo1, hi1), (lo2, hi2) = bounds
    span1 = hi1 - lo1
    span2 = hi2 - lo2
    out = []
    for p1, p2 in points:
        q1 = (p1 - lo1) / span1 if span1 > 0 else 0.0
        q2 = (p2 - lo2) / span2 if span2 > 0 else 0.0
        out.append((q1, q2))
    return out


def denormalize(points: Sequence[Point], bounds: Bounds) -> list[Point]:
    """Inverse of :func:`normalize` (degenerate objectives map to their min)."""
    (lo1, hi1), (lo2, hi2) = bounds
    span1 = hi1 - lo1
    span2 = hi2 - lo2
    return [(lo1 + p1 * span1, lo2 + p2 * span2) for p1, p2 in points]


def _min_distance(point: Point, targets: Sequence[Point]) -> float:
    p1, p2 = point
    best = math.inf
    for t1, t2 in targets:
        d = (p1 - t1) * (p1 - t1) + (p2 - t2) * (p2 - t2)
        if d < best:
            best = d
    return math.sqrt(best)


def gd(front: Sequence[Point], reference: Sequence[Point], variant: str = "standard") -> float:
    """Generational distance of ``front`` against ``reference``.

    ``standard``: sqrt of the summed squared nearest-reference distances of
    the front's points, divided by the front size.  ``swapped`` exchanges
    the roles of the two sets in the summation (an alternative index
    placement kept for side-by-side reporting) while still dividing by the
    front size.
    """
    _check_indicator_inputs(front, reference, variant)
    if variant == "standard":
        total = sum(_min_distance(p, reference) ** 2 for p in front)
    else:
        total = sum(_min_distance(r, front) ** 2 for r in reference)
    return math.sqrt(total) / len(front)


def igd(front: Sequence[Point], reference: Sequence[Point], variant: str = "standard") -> float:
    """Inverted generational distance.

    ``standard``: mean nearest-front distance over the reference points.
    ``swapped`` sums nearest-reference distances over the front's points
    instead, still dividing by the reference size.
    """
    _check_indicator_inputs(front, reference, variant)
    if variant == "standard":
        total = sum(_min_distance(r, front) for r in reference)
    else:
        total = sum(_min_distance(p, reference) for p in front)
    return total / len(reference)


def spread(front: Sequence[Point], bounds: Bounds) -> float:
    """Diagonal extent of the front in normalized space; larger is better."""
    if not front:
        raise ValueError("spread of an empty front is undefined")
    pts = normalize(front, bounds)
    ext1 = max(p[0] for p in pts) - min(p[0] for p in pts)
    ext2 = max(p[1] for p in pts) - min(p[1] for p in pts)
    return math.sqrt(ext1 * ext1 + ext2 * ext2)


def build_reference_front(
    archives: Iterable[Sequence[Point]], exact: Sequence[Point] | None = None
) -> tuple[list[Point], Bounds]:
    """Reference front and its bounds from all contributed archives.

    The reference is the non-dominated filter of the union; when the exact
    front is known (small, enumerable instances) it replaces the union.
    """
    if exact is not None:
        front = nondominated_filter(exact)
    else:
        merged: list[Point] = []
        for archive in archives:
            merged.extend(archive)
        front = nondominated_filter(merged)
    if not front:
        raise ValueError("reference front is empty")
    return front, bounds_of(front)


def _check_indicator_inputs(
    front: Sequence[Point], reference: Sequence[Point], variant: str
) -> None:
    if variant not in _VARIANTS:
        raise ValueError(f"unknown indicator variant {variant!r}")
    if not front:
        raise ValueError("indicator undefined for an empty front")
    if not reference:
        raise ValueError("indicator undefined for an empty reference front")

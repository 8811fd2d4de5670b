"""Exact 2D primitives for pass geometry.

All functions are pure and operate in meters. Comparisons use a fixed
absolute epsilon; crossing tests are strict in x and inclusive at the
y-endpoints of a band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyOpponentsError

EPSILON_M = 1e-9

MIN_PASS_LENGTH_M = 0.1


@dataclass(frozen=True, slots=True)
class Point2:
    """A 2D pitch position in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")


@dataclass(frozen=True, slots=True)
class PassVector:
    """A straight pass segment from release point to reception point."""

    start: Point2
    end: Point2

    def __post_init__(self) -> None:
        if self.length() <= MIN_PASS_LENGTH_M:
            raise ValueError(
                f"pass segment too short: {self.length():.4f} m "
                f"(minimum {MIN_PASS_LENGTH_M} m)"
            )

    def length(self) -> float:
        return math.hypot(self.end.x - self.start.x, self.end.y - self.start.y)


def segment_intersects_band(
    pass_vector: PassVector,
    x_centroid: float,
    y_min: float,
    y_max: float,
) -> bool:
    """True iff the pass segment crosses the vertical band segment.

    The band is the segment {x = x_centroid, y_min <= y <= y_max}. The
    crossing must be strict in x: x_centroid has to lie strictly between
    the pass endpoints' x-coordinates. The y-span test is inclusive. A
    pass with equal endpoint x-coordinates never crosses (the open x
    interval is empty).
    """
    if y_min > y_max:
        raise ValueError(f"band span inverted: y_min={y_min} > y_max={y_max}")
    x_s, x_r = pass_vector.start.x, pass_vector.end.x
    lo, hi = (x_s, x_r) if x_s <= x_r else (x_r, x_s)
    if not (x_centroid - lo > EPSILON_M and hi - x_centroid > EPSILON_M):
        return False
    y_cross = pass_vector.start.y + (pass_vector.end.y - pass_vector.start.y) * (
        (x_centroid - x_s) / (x_r - x_s)
    )
    return (y_min - EPSILON_M) <= y_cross <= (y_max + EPSILON_M)


def point_to_segment_distance(p: Point2, seg: PassVector) -> float:
    """Euclidean distance from a point to the closest point of a closed segment."""
    ax, ay = seg.start.x, seg.start.y
    vx, vy = seg.end.x - ax, seg.end.y - ay
    denom = vx * vx + vy * vy
    t = ((p.x - ax) * vx + (p.y - ay) * vy) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(p.x - (ax + t * vx), p.y - (ay + t * vy))


def nearest_opponent_distance(p: Point2, opponents: list[Point2]) -> float:
    """Minimum Euclidean distance from a point to any opponent."""
    if not opponents:
        raise EmptyOpponentsError("no opponents to measure distance against")
    return min(math.hypot(p.x - o.x, p.y - o.y) for o in opponents)

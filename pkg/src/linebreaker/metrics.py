"""Per-pass spatial metrics: space build-up ratio, verticality, distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyOpponentsError
from .geometry import PassVector, Point2, nearest_opponent_distance
from .ingestion import PassSnapshot

# Below this passer clearance the ratio blows up on tracking jitter, so the
# distance is clamped and the estimate flagged.
MIN_PASSER_CLEARANCE_M = 0.1


@dataclass(frozen=True)
class SpaceEstimate:
    """Circular free-space estimates around passer and receiver.

    ``area_passer`` / ``area_receiver`` are the areas of the circles with
    radius equal to the nearest-opponent distance at release/reception.
    ``sbr`` is their relative change: receiver_dist^2 / passer_dist^2 - 1.
    """

    d_passer: float
    d_receiver: float
    area_passer: float
    area_receiver: float
    sbr: float
    flagged: bool = False


def compute_sbr(snapshot: PassSnapshot) -> SpaceEstimate:
    """Space build-up ratio of a pass.

    The passer's clearance is measured against opponents at the release
    frame, the receiver's against opponents at the reception frame. The
    goalkeeper counts: it genuinely occupies space.
    """
    if not snapshot.opponents or not snapshot.opponents_at_reception:
        raise EmptyOpponentsError(
            f"pass {snapshot.pass_event_id}: no opponents to measure space against"
        )
    d_p = nearest_opponent_distance(snapshot.s, [p for _, p in snapshot.opponents])
    d_r = nearest_opponent_distance(
        snapshot.r, [p for _, p in snapshot.opponents_at_reception]
    )
    flagged = d_p < MIN_PASSER_CLEARANCE_M
    if flagged:
        d_p = MIN_PASSER_CLEARANCE_M
    return SpaceEstimate(
        d_passer=d_p,
        d_receiver=d_r,
        area_passer=math.pi * d_p * d_p,
        area_receiver=math.pi * d_r * d_r,
        sbr=(d_r * d_r) / (d_p * d_p) - 1.0,
        flagged=flagged,
    )


def compute_verticality(pass_vector: PassVector) -> float:
    """Forward share of the pass: max(0, dx) / length, in [0, 1].

    Assumes orientation-normalized coordinates (attack toward +x).
    """
    dx = pass_vector.end.x - pass_vector.start.x
    if dx <= 0.0:
        return 0.0
    return min(1.0, dx / pass_vector.length())


def pass_distance(pass_vector: PassVector) -> float:
    """Euclidean length of the pass segment."""
    return pass_vector.length()


def pass_vector_of(snapshot: PassSnapshot) -> PassVector:
    """The straight segment from release point to reception point."""
    return PassVector(start=Point2(snapshot.s.x, snapshot.s.y), end=Point2(snapshot.r.x, snapshot.r.y))

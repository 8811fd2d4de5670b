"""Line-breaking pass classification.

A completed pass is line-breaking when, at the release instant, its
straight path crosses the x-centroid of at least one opponent band
inside that band's y-span, bypasses at least two opponents near the
pass vector, is forward, and happens in open play. Band structure comes
from :mod:`linebreaker.team_shape`; every verdict carries the evaluated
shape and the per-filter counts so downstream reports can explain it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .errors import EmptyOpponentsError, LinebreakerError
from .geometry import EPSILON_M, PassVector, Point2, point_to_segment_distance
from .ingestion import (
    OPEN_PLAY_GUARD_EVENTS,
    EventOutcome,
    EventType,
    NormalizedMatch,
    PassSnapshot,
    snapshot_pass,
)
from .metrics import compute_sbr, compute_verticality, pass_distance, pass_vector_of
from .team_shape import ShapeConfig, TeamShape, cluster_team_shape, crossed_cluster_ids

logger = logging.getLogger(__name__)

DEFAULT_BYPASS_RADIUS_M = 10.0
DEFAULT_MIN_FORWARD_M = 0.0


@dataclass(frozen=True)
class DetectConfig:
    """Detection thresholds plus nested shape-clustering knobs."""

    bypass_radius_m: float = DEFAULT_BYPASS_RADIUS_M
    min_forward_m: float = DEFAULT_MIN_FORWARD_M
    open_play_guard_events: int = OPEN_PLAY_GUARD_EVENTS
    shape: ShapeConfig = field(default_factory=ShapeConfig)

    def __post_init__(self) -> None:
        if self.bypass_radius_m <= 0:
            raise ValueError("bypass_radius_m must be positive")
        if self.open_play_guard_events < 0:
            raise ValueError("open_play_guard_events must be >= 0")


@dataclass(frozen=True)
class LbpRecord:
    """Verdict and per-filter diagnostics for one completed pass."""

    match_id: str
    pass_event_id: str
    team_id: str
    passer_id: str
    receiver_id: str
    frame_id: int
    is_open_play: bool
    is_lbp: bool
    lines_crossed: int
    bypassed_count: int
    crossed_cluster_ids: tuple[int, ...] = ()
    shape: TeamShape | None = None
    sbr: float | None = None
    sbr_flagged: bool = False
    verticality: float | None = None
    pass_distance_m: float | None = None
    valid: bool = True
    error: str | None = None


def count_bypassed_opponents(
    pass_vector: PassVector, opponents: list[Point2], radius_m: float = DEFAULT_BYPASS_RADIUS_M
) -> int:
    """Opponents strictly between the endpoints in x and within radius of the segment."""
    if radius_m <= 0:
        raise ValueError("radius_m must be positive")
    x_s, x_r = pass_vector.start.x, pass_vector.end.x
    lo, hi = (x_s, x_r) if x_s <= x_r else (x_r, x_s)
    count = 0
    for p in opponents:
        if p.x - lo > EPSILON_M and hi - p.x > EPSILON_M:
            if point_to_segment_distance(p, pass_vector) <= radius_m + EPSILON_M:
                count += 1
    return count


def detect_lbp(snapshot: PassSnapshot, config: DetectConfig | None = None) -> LbpRecord:
    """Classify one pass snapshot; diagnostics populated regardless of verdict."""
    config = config or DetectConfig()
    if not snapshot.opponents:
        raise EmptyOpponentsError(
            f"pass {snapshot.pass_event_id}: no opponents on pitch at release"
        )
    clustered = snapshot.opponents
    if config.shape.exclude_goalkeeper:
        clustered = tuple(
            (pid, p) for pid, p in snapshot.opponents if pid not in snapshot.goalkeeper_ids
        )
        if not clustered:
            raise EmptyOpponentsError(
                f"pass {snapshot.pass_event_id}: only goalkeepers left to cluster"
            )
    shape = cluster_team_shape(list(clustered), config.shape)

    pv = pass_vector_of(snapshot)
    crossed = crossed_cluster_ids(pv, shape)
    bypassed = count_bypassed_opponents(
        pv, [p for _, p in snapshot.opponents], config.bypass_radius_m
    )
    forward = snapshot.r.x > snapshot.s.x + config.min_forward_m
    is_lbp = snapshot.is_open_play and forward and bypassed >= 2 and len(crossed) >= 1
    return LbpRecord(
        match_id="",
        pass_event_id=snapshot.pass_event_id,
        team_id=snapshot.team_id,
        passer_id=snapshot.passer_id,
        receiver_id=snapshot.receiver_id,
        frame_id=snapshot.t_frame,
        is_open_play=snapshot.is_open_play,
        is_lbp=is_lbp,
        lines_crossed=len(crossed),
        bypassed_count=bypassed,
        crossed_cluster_ids=crossed,
        shape=shape,
        verticality=compute_verticality(pv),
        pass_distance_m=pass_distance(pv),
    )


def _invalid_record(match_id: str, event, message: str) -> LbpRecord:
    return LbpRecord(
        match_id=match_id,
        pass_event_id=event.event_id,
        team_id=event.team_id,
        passer_id=event.player_id,
        receiver_id=event.receiver_id or "",
        frame_id=event.frame_id,
        is_open_play=False,
        is_lbp=False,
        lines_crossed=0,
        bypassed_count=0,
        valid=False,
        error=message,
    )


def detect_all(match: NormalizedMatch, config: DetectConfig | None = None) -> list[LbpRecord]:
    """One record per completed pass, in event order.

    Set-piece deliveries and guarded first touches still yield records
    (with ``is_open_play=False``, hence ``is_lbp=False``) so possession
    and report layers see the full pass population. Per-pass failures
    mark the record invalid instead of aborting the batch.
    """
    config = config or DetectConfig()
    records: list[LbpRecord] = []
    for event in match.events:
        if event.type is not EventType.PASS or event.outcome is not EventOutcome.COMPLETE:
            continue
        try:
            snapshot = snapshot_pass(match, event, config.open_play_guard_events)
            record = detect_lbp(snapshot, config)
        except (LinebreakerError, ValueError) as exc:
            logger.warning("pass %s skipped: %s", event.event_id, exc)
            records.append(_invalid_record(match.meta.match_id, event, str(exc)))
            continue
        try:
            space = compute_sbr(snapshot)
            record = replace(
                record,
                match_id=match.meta.match_id,
                sbr=space.sbr,
                sbr_flagged=space.flagged,
            )
        except EmptyOpponentsError as exc:
            record = replace(
                record, match_id=match.meta.match_id, error=f"sbr unavailable: {exc}"
            )
        records.append(record)
    return records

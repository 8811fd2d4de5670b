"""Possession segmentation and line-break chain detection.

A possession is a maximal run of same-team on-ball events, broken by any
opponent event, any restart, or a period boundary. Within a possession:

- a single-link chain is a line-breaking pass whose receiver's next
  action is a shot, or which is the final pass before a shot (the
  assist);
- a double-link chain is a pair of consecutive line-breaking passes
  (the first receiver immediately plays the second) concluding in a
  shot within a configurable lookahead.

A shot is attributed to the longest qualifying chain: shots that
conclude a double-link chain never also produce a single-link record.
Reception events are bookkeeping for the preceding pass and are skipped
when deciding what a player did "next".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .ingestion import EventOutcome, EventType, MatchEvent, NormalizedMatch
from .lbp_detection import LbpRecord

DEFAULT_CONCLUSION_LOOKAHEAD = 1


class ChainKind(str, Enum):
    LBPCH1 = "LBPCh1"
    LBPCH2 = "LBPCh2"


class ChainOutcome(str, Enum):
    GOAL = "goal"
    SHOT_ON_TARGET = "shot_on_target"
    SHOT_OFF_TARGET = "shot_off_target"
    DISALLOWED = "disallowed"


_SHOT_OUTCOME_MAP = {
    EventOutcome.GOAL: ChainOutcome.GOAL,
    EventOutcome.SAVED: ChainOutcome.SHOT_ON_TARGET,
    EventOutcome.OFF_TARGET: ChainOutcome.SHOT_OFF_TARGET,
    EventOutcome.DISALLOWED: ChainOutcome.DISALLOWED,
    EventOutcome.COMPLETE: ChainOutcome.SHOT_ON_TARGET,
    EventOutcome.INCOMPLETE: ChainOutcome.SHOT_OFF_TARGET,
}


@dataclass(frozen=True)
class ChainConfig:
    """Chain detection knobs."""

    conclusion_lookahead_events: int = DEFAULT_CONCLUSION_LOOKAHEAD

    def __post_init__(self) -> None:
        if self.conclusion_lookahead_events < 1:
            raise ValueError("conclusion_lookahead_events must be >= 1")


@dataclass(frozen=True)
class Possession:
    """A maximal same-team run of on-ball events."""

    possession_id: int
    match_id: str
    team_id: str
    event_ids: tuple[str, ...]
    start_frame: int
    end_frame: int
    open_play: bool


@dataclass(frozen=True)
class ChainRecord:
    """A detected chain with its roles, outcome and space totals."""

    kind: ChainKind
    match_id: str
    possession_id: int
    lbp_event_ids: tuple[str, ...]
    initiator_id: str
    finisher_id: str
    shot_event_id: str
    outcome: ChainOutcome
    team_id: str
    connector_id: str | None = None
    xg: float | None = None
    cumulative_sbr: float = 0.0
    flagged: bool = False


def segment_possessions(match: NormalizedMatch) -> list[Possession]:
    """Split the event stream into possessions (deterministic)."""
    possessions: list[Possession] = []
    run: list[MatchEvent] = []
    run_team: str | None = None
    run_period: int | None = None
    first_is_restart = False

    def close() -> None:
        if not run:
            return
        possessions.append(
            Possession(
                possession_id=len(possessions),
                match_id=match.meta.match_id,
                team_id=run_team or "",
                event_ids=tuple(e.event_id for e in run),
                start_frame=run[0].frame_id,
                end_frame=run[-1].frame_id,
                open_play=not first_is_restart,
            )
        )

    for event in match.events:
        period = match.period_of_frame(event.frame_id)
        breaks = (
            event.team_id != run_team
            or period != run_period
            or event.is_set_piece
        )
        if breaks:
            close()
            run = [event]
            run_team = event.team_id
            run_period = period
            first_is_restart = event.is_set_piece
        else:
            run.append(event)
    close()
    return possessions


def _events_of(possession: Possession, events_by_id: dict[str, MatchEvent]) -> list[MatchEvent]:
    return [events_by_id[eid] for eid in possession.event_ids]


def _next_action_by(
    events: list[MatchEvent], start: int, player_id: str
) -> tuple[int, MatchEvent] | None:
    """First post-``start`` event by the player that is not a reception."""
    for j in range(start + 1, len(events)):
        e = events[j]
        if e.player_id == player_id and e.type is not EventType.RECEPTION:
            return j, e
    return None


def _first_shot_with_no_pass_between(
    events: list[MatchEvent], start: int
) -> tuple[int, MatchEvent] | None:
    for j in range(start + 1, len(events)):
        e = events[j]
        if e.type is EventType.SHOT:
            return j, e
        if e.type is EventType.PASS:
            return None
    return None


def _chain_outcome(shot: MatchEvent) -> ChainOutcome:
    return _SHOT_OUTCOME_MAP.get(shot.outcome, ChainOutcome.SHOT_OFF_TARGET)


def cumulative_sbr(
    lbp_event_ids: tuple[str, ...], records_by_event: dict[str, LbpRecord]
) -> float:
    """Sum of the member passes' space build-up ratios (missing ones skipped)."""
    return sum(
        records_by_event[eid].sbr or 0.0
        for eid in lbp_event_ids
        if eid in records_by_event
    )


def _members_flagged(
    lbp_event_ids: tuple[str, ...], records_by_event: dict[str, LbpRecord]
) -> bool:
    return any(
        records_by_event[eid].sbr_flagged
        for eid in lbp_event_ids
        if eid in records_by_event
    )


def detect_lbpch1(
    possessions: list[Possession],
    lbp_records: list[LbpRecord],
    events: tuple[MatchEvent, ...] | list[MatchEvent],
    excluded_shot_ids: frozenset[str] = frozenset(),
) -> list[ChainRecord]:
    """Single line-break directly producing a shot, or assisting one."""
    events_by_id = {e.event_id: e for e in events}
    records_by_event = {r.pass_event_id: r for r in lbp_records}
    chains: list[ChainRecord] = []
    for possession in possessions:
        pos_events = _events_of(possession, events_by_id)
        for i, event in enumerate(pos_events):
            record = records_by_event.get(event.event_id)
            if record is None or not record.is_lbp:
                continue
            candidates: list[tuple[int, MatchEvent]] = []
            nxt = _next_action_by(pos_events, i, event.receiver_id or "")
            if nxt is not None and nxt[1].type is EventType.SHOT:
                candidates.append(nxt)
            assist = _first_shot_with_no_pass_between(pos_events, i)
            if assist is not None:
                candidates.append(assist)
            if not candidates:
                continue
            _, shot = min(candidates, key=lambda c: c[0])
            if shot.event_id in excluded_shot_ids:
                continue
            member_ids = (event.event_id,)
            chains.append(
                ChainRecord(
                    kind=ChainKind.LBPCH1,
                    match_id=possession.match_id,
                    possession_id=possession.possession_id,
                    lbp_event_ids=member_ids,
                    initiator_id=event.player_id,
                    finisher_id=shot.player_id,
                    shot_event_id=shot.event_id,
                    outcome=_chain_outcome(shot),
                    team_id=possession.team_id,
                    xg=shot.xg(),
                    cumulative_sbr=cumulative_sbr(member_ids, records_by_event),
                    flagged=_members_flagged(member_ids, records_by_event),
                )
            )
    return chains


def detect_lbpch2(
    possessions: list[Possession],
    lbp_records: list[LbpRecord],
    events: tuple[MatchEvent, ...] | list[MatchEvent],
    config: ChainConfig | None = None,
) -> list[ChainRecord]:
    """Two consecutive line-breaks concluding in a shot.

    The connector must receive the first line-break and deliver the
    second as their very next action. When three or more line-breaks
    chain up, only the trailing pair is emitted.
    """
    config = config or ChainConfig()
    events_by_id = {e.event_id: e for e in events}
    records_by_event = {r.pass_event_id: r for r in lbp_records}
    chains: list[ChainRecord] = []
    for possession in possessions:
        pos_events = _events_of(possession, events_by_id)
        candidates: list[tuple[int, int, MatchEvent, MatchEvent]] = []
        for i, first in enumerate(pos_events):
            rec1 = records_by_event.get(first.event_id)
            if rec1 is None or not rec1.is_lbp or first.receiver_id is None:
                continue
            nxt = _next_action_by(pos_events, i, first.receiver_id)
            if nxt is None:
                continue
            j, second = nxt
            rec2 = records_by_event.get(second.event_id)
            if second.type is not EventType.PASS or rec2 is None or not rec2.is_lbp:
                continue
            candidates.append((i, j, first, second))

        concluded: list[tuple[int, int, MatchEvent, MatchEvent, MatchEvent]] = []
        for i, j, first, second in candidates:
            seen = 0
            for m in range(j + 1, len(pos_events)):
                e = pos_events[m]
                if e.type is EventType.RECEPTION:
                    continue
                seen += 1
                if seen > config.conclusion_lookahead_events:
                    break
                if e.type is EventType.SHOT and (
                    e.player_id == second.receiver_id or seen == 1
                ):
                    concluded.append((i, j, first, second, e))
                    break
        # longest chain wins: drop a pair whose second link starts another pair
        first_ids = {first.event_id for _, _, first, _, _ in concluded}
        for i, j, first, second, shot in concluded:
            if second.event_id in first_ids:
                continue
            member_ids = (first.event_id, second.event_id)
            chains.append(
                ChainRecord(
                    kind=ChainKind.LBPCH2,
                    match_id=possession.match_id,
                    possession_id=possession.possession_id,
                    lbp_event_ids=member_ids,
                    initiator_id=first.player_id,
                    connector_id=second.player_id,
                    finisher_id=shot.player_id,
                    shot_event_id=shot.event_id,
                    outcome=_chain_outcome(shot),
                    team_id=possession.team_id,
                    xg=shot.xg(),
                    cumulative_sbr=cumulative_sbr(member_ids, records_by_event),
                    flagged=_members_flagged(member_ids, records_by_event),
                )
            )
    return chains


def detect_chains(
    match: NormalizedMatch,
    lbp_records: list[LbpRecord],
    config: ChainConfig | None = None,
) -> tuple[list[ChainRecord], list[ChainRecord]]:
    """Run both chain detectors with shot attribution to the longest chain."""
    config = config or ChainConfig()
    possessions = segment_possessions(match)
    ch2 = detect_lbpch2(possessions, lbp_records, match.events, config)
    claimed = frozenset(c.shot_event_id for c in ch2)
    ch1 = detect_lbpch1(possessions, lbp_records, match.events, excluded_shot_ids=claimed)
    return ch1, ch2

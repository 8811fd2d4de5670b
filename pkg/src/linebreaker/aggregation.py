"""Team- and player-level rollups of pass and chain records."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable

from .chains import ChainKind, ChainRecord
from .errors import UnknownMetricError
from .ingestion import Roster
from .lbp_detection import LbpRecord


@dataclass(frozen=True)
class EntityStats:
    """Aggregated line-breaking output of one team or player.

    Percentages are over line-breaking passes with an available space
    ratio. ``flagged_count`` tallies members whose passer clearance was
    clamped; their ratios are included in sums unchanged. The per-90
    columns are filled only on request and approximate appearances by
    matches with at least one line-breaking record.
    """

    entity_kind: str  # "team" | "player"
    entity_id: str
    team_id: str
    lbp_count: int
    lines_broken_total: int
    cumulative_sbr: float
    positive_sbr_pct: float
    avg_pass_distance: float
    avg_verticality: float
    lbpch1_count: int
    lbpch2_count: int
    flagged_count: int
    lbp_per90: float | None = None
    cumulative_sbr_per90: float | None = None


_NUMERIC_METRICS = {
    f.name
    for f in fields(EntityStats)
    if f.name not in ("entity_kind", "entity_id", "team_id")
}


class _Accumulator:
    __slots__ = (
        "team_id",
        "lbp_count",
        "lines",
        "sbr_sum",
        "sbr_n",
        "sbr_pos",
        "dist_sum",
        "vert_sum",
        "geom_n",
        "ch1",
        "ch2",
        "flagged",
        "matches",
    )

    def __init__(self, team_id: str):
        self.team_id = team_id
        self.lbp_count = 0
        self.lines = 0
        self.sbr_sum = 0.0
        self.sbr_n = 0
        self.sbr_pos = 0
        self.dist_sum = 0.0
        self.vert_sum = 0.0
        self.geom_n = 0
        self.ch1 = 0
        self.ch2 = 0
        self.flagged = 0
        self.matches: set[str] = set()

    def add_record(self, r: LbpRecord) -> None:
        self.lbp_count += 1
        self.lines += r.lines_crossed
        self.matches.add(r.match_id)
        if r.sbr is not None:
            self.sbr_sum += r.sbr
            self.sbr_n += 1
            if r.sbr > 0:
                self.sbr_pos += 1
        if r.sbr_flagged:
            self.flagged += 1
        if r.pass_distance_m is not None and r.verticality is not None:
            self.dist_sum += r.pass_distance_m
            self.vert_sum += r.verticality
            self.geom_n += 1

    def stats(self, kind: str, entity_id: str, per90: bool) -> EntityStats:
        n_matches = max(len(self.matches), 1)
        return EntityStats(
            entity_kind=kind,
            entity_id=entity_id,
            team_id=self.team_id,
            lbp_count=self.lbp_count,
            lines_broken_total=self.lines,
            cumulative_sbr=self.sbr_sum,
            positive_sbr_pct=(100.0 * self.sbr_pos / self.sbr_n) if self.sbr_n else 0.0,
            avg_pass_distance=(self.dist_sum / self.geom_n) if self.geom_n else 0.0,
            avg_verticality=(self.vert_sum / self.geom_n) if self.geom_n else 0.0,
            lbpch1_count=self.ch1,
            lbpch2_count=self.ch2,
            flagged_count=self.flagged,
            lbp_per90=(self.lbp_count / n_matches) if per90 else None,
            cumulative_sbr_per90=(self.sbr_sum / n_matches) if per90 else None,
        )


def aggregate(
    records: Iterable[LbpRecord],
    chains: Iterable[ChainRecord] = (),
    roster: Roster | None = None,
    per90: bool = False,
) -> tuple[list[EntityStats], list[EntityStats]]:
    """Roll records and chains up into (team_table, player_table).

    Only entities with at least one line-breaking pass appear. Chain
    credit goes to the chain's team and, at player level, its initiator.
    Tables are ordered by lbp_count descending, ties by entity id.
    """
    teams: dict[str, _Accumulator] = {}
    players: dict[str, _Accumulator] = {}
    for r in records:
        if not (r.valid and r.is_lbp):
            continue
        team_id = r.team_id
        if roster is not None:
            team_id = roster.team_of(r.passer_id) or r.team_id
        teams.setdefault(team_id, _Accumulator(team_id)).add_record(r)
        players.setdefault(r.passer_id, _Accumulator(team_id)).add_record(r)
    for c in chains:
        team_acc = teams.get(c.team_id)
        player_acc = players.get(c.initiator_id)
        for acc in (team_acc, player_acc):
            if acc is None:
                continue
            if c.kind is ChainKind.LBPCH1:
                acc.ch1 += 1
            else:
                acc.ch2 += 1

    def table(accs: dict[str, _Accumulator], kind: str) -> list[EntityStats]:
        rows = [acc.stats(kind, entity_id, per90) for entity_id, acc in accs.items()]
        rows.sort(key=lambda s: (-s.lbp_count, s.entity_id))
        return rows

    return table(teams, "team"), table(players, "player")


def top_n(table: list[EntityStats], metric_name: str, n: int) -> list[EntityStats]:
    """First n rows under a descending sort by the metric, ties by entity id."""
    if metric_name not in _NUMERIC_METRICS:
        raise UnknownMetricError(
            f"unknown metric {metric_name!r}; available: {sorted(_NUMERIC_METRICS)}"
        )
    if n <= 0:
        return []

    def key(s: EntityStats):
        v = getattr(s, metric_name)
        return (-(v if v is not None else float("-inf")), s.entity_id)

    return sorted(table, key=key)[:n]

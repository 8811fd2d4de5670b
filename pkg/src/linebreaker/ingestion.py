"""Match loading, event/frame synchronization, smoothing and orientation.

Input is the normalized four-file layout (all coordinates in meters,
origin at a pitch corner, x along the pitch length):

- ``meta.json``: pitch dimensions, frame rate, periods with per-team
  attack direction (``"+x"`` / ``"-x"``).
- ``tracking.jsonl``: one frame per line,
  ``{"frame_id":N,"t":T,"players":[{"pid","tid","x","y"},...],"ball":{"x","y"}|null}``.
- ``events.json``: array of on-ball events (see MatchEvent).
- ``roster.json``: array of ``{"player_id","team_id","jersey","role"}``.

Tracking ingestion is the hot path (a full match is ~162k frames), so a
strict-form line parser handles the canonical serialization written by
this module and falls back to ``json.loads`` per batch for anything
else. Both paths produce identical float64 values.

Tracking is stored columnar: one (n_frames, n_players, 2) array with NaN
marking players not on the pitch, which keeps smoothing, reflection and
bounds checks vectorized.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BoundsError,
    MissingPlayerError,
    OrientationError,
    SchemaError,
    SyncError,
)
from .geometry import Point2

logger = logging.getLogger(__name__)

# Ingestion defaults
SYNC_TOLERANCE_S = 1.0  # max |event frame - nearest tracking frame| as time
PITCH_BOUNDS_PAD_M = 5.0
DEFAULT_SMOOTHING_WINDOW = 7  # ~0.23 s at 29.97 Hz
RECEPTION_BALL_RADIUS_M = 1.5  # receiver-to-ball distance that marks arrival
FALLBACK_PASS_SPEED_MPS = 15.0  # used to estimate reception frame
OPEN_PLAY_GUARD_EVENTS = 2  # events after a restart still counted as dead-ball

_BATCH_LINES = 20_000
_DELETE_JSON_PUNCT = str.maketrans("", "", ":,{}[]")


class EventType(str, Enum):
    PASS = "pass"
    SHOT = "shot"
    RECEPTION = "reception"
    INTERCEPTION = "interception"
    CLEARANCE = "clearance"
    KICKOFF = "kickoff"
    THROW_IN = "throw_in"
    FREE_KICK = "free_kick"
    CORNER = "corner"
    GOAL_KICK = "goal_kick"
    PENALTY = "penalty"
    OTHER = "other"


SET_PIECE_TYPES = frozenset(
    {
        EventType.KICKOFF,
        EventType.THROW_IN,
        EventType.FREE_KICK,
        EventType.CORNER,
        EventType.GOAL_KICK,
        EventType.PENALTY,
    }
)


class EventOutcome(str, Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    GOAL = "goal"
    SAVED = "saved"
    OFF_TARGET = "off_target"
    DISALLOWED = "disallowed"


@dataclass(frozen=True)
class PeriodInfo:
    period_id: int
    start_frame: int
    end_frame: int


@dataclass(frozen=True)
class PitchMeta:
    """Pitch geometry and recording metadata."""

    length_m: float
    width_m: float
    frame_rate_hz: float
    periods: tuple[PeriodInfo, ...]
    match_id: str = "match"

    def __post_init__(self) -> None:
        if not 90.0 <= self.length_m <= 120.0:
            raise SchemaError(f"pitch_length_m {self.length_m} outside [90, 120]")
        if not 45.0 <= self.width_m <= 90.0:
            raise SchemaError(f"pitch_width_m {self.width_m} outside [45, 90]")
        if self.frame_rate_hz <= 0:
            raise SchemaError("frame_rate_hz must be positive")


@dataclass(frozen=True)
class MatchEvent:
    """One timestamped on-ball action."""

    event_id: str
    type: EventType
    team_id: str
    player_id: str
    frame_id: int
    outcome: EventOutcome
    receiver_id: str | None = None
    end_frame_id: int | None = None
    tags: frozenset[str] = frozenset()

    @property
    def is_set_piece(self) -> bool:
        return self.type in SET_PIECE_TYPES

    def xg(self) -> float | None:
        """Externally supplied shot quality, carried as an ``xg:<value>`` tag."""
        for tag in self.tags:
            if tag.startswith("xg:"):
                try:
                    return float(tag[3:])
                except ValueError:
                    return None
        return None


@dataclass(frozen=True)
class RosterEntry:
    player_id: str
    team_id: str
    jersey: int
    role: str  # "goalkeeper" | "outfield"


@dataclass(frozen=True)
class Roster:
    entries: tuple[RosterEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_team_of", {e.player_id: e.team_id for e in self.entries}
        )
        gk: dict[str, set[str]] = {}
        for e in self.entries:
            if e.role == "goalkeeper":
                gk.setdefault(e.team_id, set()).add(e.player_id)
        object.__setattr__(self, "_goalkeepers", {t: frozenset(s) for t, s in gk.items()})

    def team_of(self, player_id: str) -> str | None:
        return self._team_of.get(player_id)

    def goalkeepers(self, team_id: str) -> frozenset[str]:
        return self._goalkeepers.get(team_id, frozenset())

    def team_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for e in self.entries:
            seen.setdefault(e.team_id, None)
        return tuple(seen)


@dataclass(frozen=True)
class TrackingFrame:
    """One materialized tracking frame (players as (pid, tid, x, y))."""

    frame_id: int
    timestamp_s: float
    players: tuple[tuple[str, str, float, float], ...]
    ball: tuple[float, float] | None


@dataclass
class Tracking:
    """Columnar tracking store; NaN marks a player not on the pitch."""

    frame_ids: np.ndarray  # (n,) int64, strictly increasing
    times: np.ndarray  # (n,) float64 seconds
    xy: np.ndarray  # (n, P, 2) float64
    ball: np.ndarray  # (n, 2) float64
    player_ids: tuple[str, ...]
    team_ids: tuple[str, ...]  # team of each column

    def __post_init__(self) -> None:
        self.col_of = {pid: i for i, pid in enumerate(self.player_ids)}
        teams: dict[str, list[int]] = {}
        for i, tid in enumerate(self.team_ids):
            teams.setdefault(tid, []).append(i)
        self.team_cols = {t: np.array(c, dtype=np.int64) for t, c in teams.items()}

    @property
    def n_frames(self) -> int:
        return len(self.frame_ids)

    def row_of_frame(self, frame_id: int, tolerance_frames: float) -> int:
        """Row of the nearest frame, or -1 if beyond tolerance."""
        pos = int(np.searchsorted(self.frame_ids, frame_id))
        best, best_d = -1, tolerance_frames
        for cand in (pos - 1, pos):
            if 0 <= cand < len(self.frame_ids):
                d = abs(int(self.frame_ids[cand]) - frame_id)
                if d <= best_d:
                    best, best_d = cand, d
        return best

    def frame(self, row: int) -> TrackingFrame:
        players = []
        for c in range(self.xy.shape[1]):
            x, y = self.xy[row, c]
            if math.isfinite(x):
                players.append((self.player_ids[c], self.team_ids[c], float(x), float(y)))
        bx, by = self.ball[row]
        ball = (float(bx), float(by)) if math.isfinite(bx) else None
        return TrackingFrame(
            frame_id=int(self.frame_ids[row]),
            timestamp_s=float(self.times[row]),
            players=tuple(players),
            ball=ball,
        )


class FrameView(Sequence[TrackingFrame]):
    """Lazy sequence of TrackingFrame over the columnar store."""

    def __init__(self, tracking: Tracking):
        self._tracking = tracking

    def __len__(self) -> int:
        return self._tracking.n_frames

    def __getitem__(self, i: int) -> TrackingFrame:  # type: ignore[override]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        return self._tracking.frame(i)

    def __iter__(self) -> Iterator[TrackingFrame]:
        for i in range(len(self)):
            yield self._tracking.frame(i)


@dataclass
class NormalizedMatch:
    """A fully loaded match with resolved attack directions."""

    meta: PitchMeta
    tracking: Tracking
    events: tuple[MatchEvent, ...]
    roster: Roster
    attack_direction: dict[tuple[str, int], str]  # (team_id, period_id) -> "+x"/"-x"

    def __post_init__(self) -> None:
        self._event_index = {e.event_id: i for i, e in enumerate(self.events)}
        self._period_rows = {}
        for p in self.meta.periods:
            lo = int(np.searchsorted(self.tracking.frame_ids, p.start_frame, side="left"))
            hi = int(np.searchsorted(self.tracking.frame_ids, p.end_frame, side="right"))
            self._period_rows[p.period_id] = (lo, hi)

    @property
    def frames(self) -> FrameView:
        return FrameView(self.tracking)

    def event_position(self, event_id: str) -> int:
        return self._event_index[event_id]

    def period_of_frame(self, frame_id: int) -> int:
        for p in self.meta.periods:
            if p.start_frame <= frame_id <= p.end_frame:
                return p.period_id
        raise SyncError(f"frame {frame_id} lies outside every period")

    def period_rows(self, period_id: int) -> tuple[int, int]:
        return self._period_rows[period_id]


@dataclass(frozen=True)
class PassSnapshot:
    """A completed pass frozen at release time, orientation-normalized.

    Coordinates are in the passing team's attacking frame (attack = +x).
    ``opponents`` are the opposing players on the pitch at the release
    frame; ``opponents_at_reception`` at the reception frame.
    """

    pass_event_id: str
    team_id: str
    passer_id: str
    receiver_id: str
    t_frame: int
    reception_frame: int
    s: Point2
    r: Point2
    opponents: tuple[tuple[str, Point2], ...]
    opponents_at_reception: tuple[tuple[str, Point2], ...]
    goalkeeper_ids: frozenset[str]
    is_open_play: bool


# ---------------------------------------------------------------------------
# Tracking parser


class _FastPathMiss(Exception):
    """A line batch does not match the canonical strict form."""


def _parse_tracking_batch_fast(lines: list[str], col_of: dict[str, int]):
    """Parse a batch of canonical-form lines into batch arrays.

    Raises _FastPathMiss whenever any structural check fails; the caller
    then re-parses the batch with the tolerant JSON path.
    """
    raw_nums: list[str] = []
    hdr_nums: list[str] = []
    cols: list[np.ndarray] = []
    counts: list[int] = []
    ball_flags: list[bool] = []
    prev_pids: list[str] | None = None
    prev_cols: np.ndarray | None = None

    for line in lines:
        parts = line.split('"')
        npart = len(parts)
        if npart < 19:
            raise _FastPathMiss
        tail = parts[-1]
        if tail == ":null}":
            has_ball = False
            n12 = npart - 9
        elif tail.endswith("}}"):
            has_ball = True
            n12 = npart - 13
        else:
            raise _FastPathMiss
        if (
            n12 <= 0
            or n12 % 12
            or parts[1] != "frame_id"
            or parts[3] != "t"
            or parts[5] != "players"
            or parts[7] != "pid"
            or parts[11] != "tid"
            or parts[15] != "x"
            or parts[17] != "y"
        ):
            raise _FastPathMiss
        n_players = n12 // 12
        lim = 7 + 12 * n_players
        pids = parts[9:lim:12]
        if pids != prev_pids:
            try:
                prev_cols = np.array([col_of[p] for p in pids], dtype=np.int64)
            except KeyError as exc:
                raise _FastPathMiss from exc
            prev_pids = pids
        cols.append(prev_cols)
        hdr_nums.append(parts[2])
        hdr_nums.append(parts[4])
        raw_nums.extend(parts[16:lim:12])
        raw_nums.extend(parts[18:lim:12])
        if has_ball:
            if parts[-6] != "ball" or parts[-4] != "x" or parts[-2] != "y":
                raise _FastPathMiss
            raw_nums.append(parts[-3])
            raw_nums.append(parts[-1])
        counts.append(n_players)
        ball_flags.append(has_ball)

    vals = np.fromstring(" ".join(raw_nums).translate(_DELETE_JSON_PUNCT), dtype=np.float64, sep=" ")
    hvals = np.fromstring(" ".join(hdr_nums).translate(_DELETE_JSON_PUNCT), dtype=np.float64, sep=" ")
    counts_a = np.asarray(counts, dtype=np.int64)
    balls_a = np.asarray(ball_flags, dtype=bool)
    if len(vals) != int(2 * counts_a.sum() + 2 * balls_a.sum()) or not np.isfinite(vals).all():
        raise _FastPathMiss
    if len(hvals) != 2 * len(lines) or not np.isfinite(hvals).all():
        raise _FastPathMiss

    fid_arr = hvals[0::2]
    if not (fid_arr == np.floor(fid_arr)).all():
        raise _FastPathMiss
    t_arr = hvals[1::2]
    return fid_arr.astype(np.int64), t_arr, counts_a, balls_a, np.concatenate(cols), vals


def _parse_tracking_batch_slow(lines: list[str], col_of: dict[str, int], line_offset: int):
    """Tolerant per-line JSON parse of a batch (also validates the schema)."""
    fids, ts, counts, ball_flags = [], [], [], []
    cols: list[int] = []
    vals: list[float] = []
    for i, line in enumerate(lines):
        lineno = line_offset + i + 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"tracking line {lineno}: invalid JSON ({exc.msg})") from exc
        try:
            fid = int(obj["frame_id"])
            t = float(obj["t"])
            players = obj["players"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"tracking line {lineno}: missing frame_id/t/players") from exc
        xs_line: list[float] = []
        ys_line: list[float] = []
        for p in players:
            try:
                pid = p["pid"]
                x = float(p["x"])
                y = float(p["y"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"tracking line {lineno}: malformed player entry") from exc
            if pid not in col_of:
                raise SchemaError(f"tracking line {lineno}: player {pid!r} not in roster")
            if not (math.isfinite(x) and math.isfinite(y)):
                raise SchemaError(f"tracking line {lineno}: non-finite coordinates")
            cols.append(col_of[pid])
            xs_line.append(x)
            ys_line.append(y)
        ball = obj.get("ball")
        fids.append(fid)
        ts.append(t)
        counts.append(len(players))
        vals.extend(xs_line)
        vals.extend(ys_line)
        if ball is None:
            ball_flags.append(False)
        else:
            try:
                vals.append(float(ball["x"]))
                vals.append(float(ball["y"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"tracking line {lineno}: malformed ball entry") from exc
            ball_flags.append(True)
    return (
        np.asarray(fids, dtype=np.int64),
        np.asarray(ts, dtype=np.float64),
        np.asarray(counts, dtype=np.int64),
        np.asarray(ball_flags, dtype=bool),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=np.float64),
    )


def _scatter_batch(parsed, n_cols: int):
    """Turn flat batch arrays into dense (B, P, 2) player and (B, 2) ball arrays."""
    fid_arr, t_arr, counts_a, balls_a, col_idx, vals = parsed
    b = len(fid_arr)
    xy = np.full((b, n_cols, 2), np.nan)
    tot = 2 * counts_a + 2 * balls_a
    ends = np.cumsum(tot)
    starts = ends - tot
    cum0 = np.concatenate(([0], np.cumsum(counts_a)[:-1]))
    offs = np.arange(int(counts_a.sum()), dtype=np.int64) - np.repeat(cum0, counts_a)
    xpos = np.repeat(starts, counts_a) + offs
    ypos = xpos + np.repeat(counts_a, counts_a)
    frame_rep = np.repeat(np.arange(b), counts_a)
    xy[frame_rep, col_idx, 0] = vals[xpos]
    xy[frame_rep, col_idx, 1] = vals[ypos]
    ball = np.full((b, 2), np.nan)
    if balls_a.any():
        ball[balls_a, 0] = vals[ends[balls_a] - 2]
        ball[balls_a, 1] = vals[ends[balls_a] - 1]
    return fid_arr, t_arr, xy, ball


def _read_tracking(path: Path, roster: Roster) -> Tracking:
    player_ids = tuple(e.player_id for e in roster.entries)
    team_ids = tuple(e.team_id for e in roster.entries)
    col_of = {pid: i for i, pid in enumerate(player_ids)}
    n_cols = len(player_ids)

    fid_parts, t_parts, xy_parts, ball_parts = [], [], [], []
    batch: list[str] = []
    line_offset = 0

    def flush(batch: list[str], line_offset: int) -> None:
        try:
            parsed = _parse_tracking_batch_fast(batch, col_of)
        except _FastPathMiss:
            parsed = _parse_tracking_batch_slow(batch, col_of, line_offset)
        fid_arr, t_arr, xy, ball = _scatter_batch(parsed, n_cols)
        fid_parts.append(fid_arr)
        t_parts.append(t_arr)
        xy_parts.append(xy)
        ball_parts.append(ball)

    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            batch.append(line)
            if len(batch) >= _BATCH_LINES:
                flush(batch, line_offset)
                line_offset += len(batch)
                batch = []
    if batch:
        flush(batch, line_offset)
    if not fid_parts:
        raise SchemaError(f"{path}: tracking file contains no frames")

    frame_ids = np.concatenate(fid_parts)
    times = np.concatenate(t_parts)
    xy = np.concatenate(xy_parts)
    ball = np.concatenate(ball_parts)
    if len(frame_ids) > 1 and not (np.diff(frame_ids) > 0).all():
        bad = int(np.argmin(np.diff(frame_ids) > 0))
        raise SchemaError(
            f"{path}: frame_id not strictly increasing near line {bad + 2}"
        )
    return Tracking(
        frame_ids=frame_ids,
        times=times,
        xy=xy,
        ball=ball,
        player_ids=player_ids,
        team_ids=team_ids,
    )


def _check_bounds(tracking: Tracking, meta: PitchMeta) -> None:
    lo = -PITCH_BOUNDS_PAD_M
    hi_x = meta.length_m + PITCH_BOUNDS_PAD_M
    hi_y = meta.width_m + PITCH_BOUNDS_PAD_M
    for arr in (tracking.xy.reshape(-1, 2), tracking.ball):
        with np.errstate(invalid="ignore"):
            x_bad = np.nanmin(arr[:, 0]) < lo or np.nanmax(arr[:, 0]) > hi_x
            y_bad = np.nanmin(arr[:, 1]) < lo or np.nanmax(arr[:, 1]) > hi_y
        if x_bad or y_bad:
            raise BoundsError(
                f"coordinates outside pitch bounds + {PITCH_BOUNDS_PAD_M} m tolerance"
            )


# ---------------------------------------------------------------------------
# File readers


def _load_meta(path: Path) -> tuple[PitchMeta, dict[tuple[str, int], str]]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg})") from exc
    try:
        periods = []
        directions: dict[tuple[str, int], str] = {}
        for p in obj["periods"]:
            info = PeriodInfo(
                period_id=int(p["id"]),
                start_frame=int(p["start_frame"]),
                end_frame=int(p["end_frame"]),
            )
            periods.append(info)
            for team, d in (p.get("attack_direction") or {}).items():
                if d not in ("+x", "-x"):
                    raise SchemaError(f"{path}: attack_direction must be '+x' or '-x', got {d!r}")
                directions[(team, info.period_id)] = d
        meta = PitchMeta(
            length_m=float(obj["pitch_length_m"]),
            width_m=float(obj["pitch_width_m"]),
            frame_rate_hz=float(obj["frame_rate_hz"]),
            periods=tuple(periods),
            match_id=str(obj.get("match_id", "match")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: missing or malformed metadata field ({exc})") from exc
    if not meta.periods:
        raise SchemaError(f"{path}: at least one period is required")
    return meta, directions


def _load_roster(path: Path) -> Roster:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg})") from exc
    entries = []
    seen: set[str] = set()
    try:
        for e in obj:
            role = e["role"]
            if role not in ("goalkeeper", "outfield"):
                raise SchemaError(f"{path}: unknown role {role!r}")
            pid = str(e["player_id"])
            if pid in seen:
                raise SchemaError(f"{path}: duplicate player_id {pid!r}")
            seen.add(pid)
            entries.append(
                RosterEntry(
                    player_id=pid,
                    team_id=str(e["team_id"]),
                    jersey=int(e["jersey"]),
                    role=role,
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: missing or malformed roster field ({exc})") from exc
    if not entries:
        raise SchemaError(f"{path}: roster is empty")
    return Roster(entries=tuple(entries))


def _load_events(path: Path) -> list[MatchEvent]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg})") from exc
    events = []
    dropped = 0
    try:
        for e in obj:
            if e.get("frame_id") is None:
                dropped += 1
                continue
            end_frame = e.get("end_frame_id")
            events.append(
                MatchEvent(
                    event_id=str(e["event_id"]),
                    type=EventType(e["type"]),
                    team_id=str(e["team_id"]),
                    player_id=str(e["player_id"]),
                    frame_id=int(e["frame_id"]),
                    outcome=EventOutcome(e["outcome"]),
                    receiver_id=(None if e.get("receiver_id") is None else str(e["receiver_id"])),
                    end_frame_id=(None if end_frame is None else int(end_frame)),
                    tags=frozenset(e.get("tags") or ()),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: missing or malformed event field ({exc})") from exc
    if dropped:
        logger.warning("%s: dropped %d events without a frame_id", path, dropped)
    return events


def _sync_events(
    events: list[MatchEvent], tracking: Tracking, frame_rate_hz: float
) -> tuple[MatchEvent, ...]:
    """Snap event frames to existing tracking frames within tolerance."""
    tol = SYNC_TOLERANCE_S * frame_rate_hz
    synced = []
    for e in events:
        row = tracking.row_of_frame(e.frame_id, tol)
        if row < 0:
            raise SyncError(
                f"event {e.event_id}: no tracking frame within "
                f"{SYNC_TOLERANCE_S} s of frame {e.frame_id}"
            )
        frame_id = int(tracking.frame_ids[row])
        end_frame_id = e.end_frame_id
        if end_frame_id is not None:
            end_row = tracking.row_of_frame(end_frame_id, tol)
            if end_row < 0:
                logger.warning(
                    "event %s: end_frame_id %d unresolvable, falling back",
                    e.event_id,
                    end_frame_id,
                )
                end_frame_id = None
            else:
                end_frame_id = int(tracking.frame_ids[end_row])
        if frame_id != e.frame_id or end_frame_id != e.end_frame_id:
            e = replace(e, frame_id=frame_id, end_frame_id=end_frame_id)
        synced.append(e)
    synced.sort(key=lambda e: e.frame_id)  # stable: ties keep input order
    return tuple(synced)


def _infer_direction(
    tracking: Tracking, roster: Roster, team_id: str, row_lo: int, row_hi: int
) -> str:
    gk_ids = roster.goalkeepers(team_id)
    team_cols = tracking.team_cols.get(team_id)
    if team_cols is None or not gk_ids:
        raise OrientationError(f"cannot infer attack direction for team {team_id!r}")
    gk_cols = np.array([tracking.col_of[p] for p in gk_ids if p in tracking.col_of])
    out_cols = np.array([c for c in team_cols if c not in set(gk_cols.tolist())])
    if len(gk_cols) == 0 or len(out_cols) == 0:
        raise OrientationError(f"cannot infer attack direction for team {team_id!r}")
    xs = tracking.xy[row_lo:row_hi, :, 0]
    with np.errstate(invalid="ignore"):
        gk_mean = np.nanmean(xs[:, gk_cols])
        out_mean = np.nanmean(xs[:, out_cols])
    if not (math.isfinite(gk_mean) and math.isfinite(out_mean)) or gk_mean == out_mean:
        raise OrientationError(f"cannot infer attack direction for team {team_id!r}")
    return "+x" if out_mean > gk_mean else "-x"


def _warn_goalkeeper_counts(tracking: Tracking, roster: Roster) -> None:
    for team in roster.team_ids():
        gk_cols = [
            tracking.col_of[p]
            for p in roster.goalkeepers(team)
            if p in tracking.col_of
        ]
        if not gk_cols:
            logger.warning("team %s has no goalkeeper in the roster", team)
            continue
        on_pitch = np.isfinite(tracking.xy[:, gk_cols, 0]).sum(axis=1)
        bad = int((on_pitch != 1).sum())
        if bad:
            logger.warning(
                "team %s: %d frames without exactly one goalkeeper on pitch", team, bad
            )


def load_match(
    event_path: str | Path,
    tracking_path: str | Path,
    meta_path: str | Path,
    roster_path: str | Path,
) -> NormalizedMatch:
    """Load and synchronize the four normalized input files."""
    meta, directions = _load_meta(Path(meta_path))
    roster = _load_roster(Path(roster_path))
    tracking = _read_tracking(Path(tracking_path), roster)
    _check_bounds(tracking, meta)
    events = _sync_events(_load_events(Path(event_path)), tracking, meta.frame_rate_hz)

    for period in meta.periods:
        lo, hi = (
            int(np.searchsorted(tracking.frame_ids, period.start_frame, side="left")),
            int(np.searchsorted(tracking.frame_ids, period.end_frame, side="right")),
        )
        for team in roster.team_ids():
            key = (team, period.period_id)
            if key not in directions:
                directions[key] = _infer_direction(tracking, roster, team, lo, hi)
    _warn_goalkeeper_counts(tracking, roster)
    return NormalizedMatch(
        meta=meta,
        tracking=tracking,
        events=events,
        roster=roster,
        attack_direction=directions,
    )


def load_match_dir(match_dir: str | Path) -> NormalizedMatch:
    """Load a match directory holding the four canonical file names."""
    d = Path(match_dir)
    return load_match(
        event_path=d / "events.json",
        tracking_path=d / "tracking.jsonl",
        meta_path=d / "meta.json",
        roster_path=d / "roster.json",
    )


# ---------------------------------------------------------------------------
# Serialization (canonical form; the fast parser's target)


def _jnum(v: float) -> str:
    """Shortest decimal that round-trips to the same float64."""
    return repr(float(v))


def save_match(match: NormalizedMatch, out_dir: str | Path) -> None:
    """Write the four normalized files in canonical strict form."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    periods = []
    for p in match.meta.periods:
        periods.append(
            {
                "id": p.period_id,
                "start_frame": p.start_frame,
                "end_frame": p.end_frame,
                "attack_direction": {
                    team: match.attack_direction[(team, p.period_id)]
                    for team in match.roster.team_ids()
                    if (team, p.period_id) in match.attack_direction
                },
            }
        )
    meta_obj = {
        "match_id": match.meta.match_id,
        "pitch_length_m": match.meta.length_m,
        "pitch_width_m": match.meta.width_m,
        "frame_rate_hz": match.meta.frame_rate_hz,
        "periods": periods,
    }
    (out / "meta.json").write_text(json.dumps(meta_obj, indent=2) + "\n", encoding="utf-8")

    roster_obj = [
        {
            "player_id": e.player_id,
            "team_id": e.team_id,
            "jersey": e.jersey,
            "role": e.role,
        }
        for e in match.roster.entries
    ]
    (out / "roster.json").write_text(json.dumps(roster_obj, indent=2) + "\n", encoding="utf-8")

    events_obj = []
    for e in match.events:
        events_obj.append(
            {
                "event_id": e.event_id,
                "type": e.type.value,
                "team_id": e.team_id,
                "player_id": e.player_id,
                "receiver_id": e.receiver_id,
                "frame_id": e.frame_id,
                "end_frame_id": e.end_frame_id,
                "outcome": e.outcome.value,
                "tags": sorted(e.tags),
            }
        )
    (out / "events.json").write_text(json.dumps(events_obj, indent=2) + "\n", encoding="utf-8")

    tr = match.tracking
    pid_json = [json.dumps(p) for p in tr.player_ids]
    tid_json = [json.dumps(t) for t in tr.team_ids]
    finite = np.isfinite(tr.xy[:, :, 0])
    ball_finite = np.isfinite(tr.ball[:, 0])
    with open(out / "tracking.jsonl", "w", encoding="utf-8") as f:
        for row in range(tr.n_frames):
            cols = np.nonzero(finite[row])[0]
            players = ",".join(
                f'{{"pid":{pid_json[c]},"tid":{tid_json[c]},'
                f'"x":{_jnum(tr.xy[row, c, 0])},"y":{_jnum(tr.xy[row, c, 1])}}}'
                for c in cols
            )
            if ball_finite[row]:
                ball = f'{{"x":{_jnum(tr.ball[row, 0])},"y":{_jnum(tr.ball[row, 1])}}}'
            else:
                ball = "null"
            f.write(
                f'{{"frame_id":{int(tr.frame_ids[row])},"t":{_jnum(tr.times[row])},'
                f'"players":[{players}],"ball":{ball}}}\n'
            )


def matches_equal(a: NormalizedMatch, b: NormalizedMatch) -> bool:
    """Bit-exact equality on coordinates; structural equality elsewhere."""
    return (
        a.meta == b.meta
        and a.events == b.events
        and a.roster == b.roster
        and a.attack_direction == b.attack_direction
        and a.tracking.player_ids == b.tracking.player_ids
        and a.tracking.team_ids == b.tracking.team_ids
        and np.array_equal(a.tracking.frame_ids, b.tracking.frame_ids)
        and np.array_equal(a.tracking.times, b.tracking.times)
        and np.array_equal(a.tracking.xy, b.tracking.xy, equal_nan=True)
        and np.array_equal(a.tracking.ball, b.tracking.ball, equal_nan=True)
    )


# ---------------------------------------------------------------------------
# Smoothing


def _moving_average(arr: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average along axis 0, truncated at the array edges.

    NaN runs are preserved: absent samples neither contribute to nor
    receive smoothed values, so a player's presence pattern is unchanged.
    """
    half = window // 2
    n = arr.shape[0]
    valid = np.isfinite(arr)
    filled = np.where(valid, arr, 0.0)
    csum = np.concatenate(
        [np.zeros((1,) + arr.shape[1:]), np.cumsum(filled, axis=0)], axis=0
    )
    ccnt = np.concatenate(
        [np.zeros((1,) + arr.shape[1:], dtype=np.int64), np.cumsum(valid, axis=0)],
        axis=0,
    )
    idx = np.arange(n)
    hi = np.minimum(idx + half, n - 1) + 1
    lo = np.maximum(idx - half, 0)
    wsum = csum[hi] - csum[lo]
    wcnt = ccnt[hi] - ccnt[lo]
    out = np.divide(wsum, wcnt, out=np.full_like(arr, np.nan), where=wcnt > 0)
    out[~valid] = np.nan
    return out


def smooth_positions(match: NormalizedMatch, window_frames: int = DEFAULT_SMOOTHING_WINDOW) -> NormalizedMatch:
    """Replace every trajectory (players and ball) by its moving average."""
    if window_frames < 1 or window_frames % 2 == 0:
        raise ValueError(f"window_frames must be odd and >= 1, got {window_frames}")
    if window_frames == 1:
        return match
    tr = match.tracking
    smoothed = Tracking(
        frame_ids=tr.frame_ids,
        times=tr.times,
        xy=_moving_average(tr.xy, window_frames),
        ball=_moving_average(tr.ball, window_frames),
        player_ids=tr.player_ids,
        team_ids=tr.team_ids,
    )
    return NormalizedMatch(
        meta=match.meta,
        tracking=smoothed,
        events=match.events,
        roster=match.roster,
        attack_direction=dict(match.attack_direction),
    )


# ---------------------------------------------------------------------------
# Orientation


def reflect_point(x: float, y: float, meta: PitchMeta) -> tuple[float, float]:
    """The pitch reflection used to flip attack direction (an involution)."""
    return meta.length_m - x, meta.width_m - y


def normalize_orientation(match: NormalizedMatch, team_id: str) -> NormalizedMatch:
    """A view of the match in which ``team_id`` always attacks +x.

    Periods where the team attacks -x are reflected (x -> length - x,
    y -> width - y, preserving handedness); attack directions of both
    teams are flipped in those periods so the result is self-consistent.
    Returns the input unchanged when no period needs reflection.
    """
    flip_periods = []
    for p in match.meta.periods:
        key = (team_id, p.period_id)
        if key not in match.attack_direction:
            raise OrientationError(
                f"attack direction unknown for team {team_id!r} period {p.period_id}"
            )
        if match.attack_direction[key] == "-x":
            flip_periods.append(p.period_id)
    if not flip_periods:
        return match

    tr = match.tracking
    xy = tr.xy.copy()
    ball = tr.ball.copy()
    for period_id in flip_periods:
        lo, hi = match.period_rows(period_id)
        xy[lo:hi, :, 0] = match.meta.length_m - xy[lo:hi, :, 0]
        xy[lo:hi, :, 1] = match.meta.width_m - xy[lo:hi, :, 1]
        ball[lo:hi, 0] = match.meta.length_m - ball[lo:hi, 0]
        ball[lo:hi, 1] = match.meta.width_m - ball[lo:hi, 1]
    directions = dict(match.attack_direction)
    for (team, period_id), d in match.attack_direction.items():
        if period_id in set(flip_periods):
            directions[(team, period_id)] = "+x" if d == "-x" else "-x"
    return NormalizedMatch(
        meta=match.meta,
        tracking=Tracking(
            frame_ids=tr.frame_ids,
            times=tr.times,
            xy=xy,
            ball=ball,
            player_ids=tr.player_ids,
            team_ids=tr.team_ids,
        ),
        events=match.events,
        roster=match.roster,
        attack_direction=directions,
    )


# ---------------------------------------------------------------------------
# Open play and pass snapshots


def event_is_open_play(
    match: NormalizedMatch, event: MatchEvent, guard_events: int = OPEN_PLAY_GUARD_EVENTS
) -> bool:
    """False for restarts and for events within ``guard_events`` of one.

    The guard counts on-ball actions: reception events are bookkeeping
    for the preceding pass and do not consume lookback slots.
    """
    if event.is_set_piece:
        return False
    idx = match.event_position(event.event_id)
    period = match.period_of_frame(event.frame_id)
    seen = 0
    for j in range(idx - 1, -1, -1):
        prev = match.events[j]
        if match.period_of_frame(prev.frame_id) != period:
            break
        if prev.type is EventType.RECEPTION:
            continue
        seen += 1
        if prev.is_set_piece:
            return False
        if seen >= guard_events:
            break
    return True


def _resolve_reception_row(
    match: NormalizedMatch, event: MatchEvent, pass_row: int, period_id: int
) -> int:
    tr = match.tracking
    _, row_hi = match.period_rows(period_id)
    tol = SYNC_TOLERANCE_S * match.meta.frame_rate_hz
    if event.end_frame_id is not None:
        row = tr.row_of_frame(event.end_frame_id, tol)
        if row >= 0:
            return min(row, row_hi - 1)
    receiver_col = tr.col_of.get(event.receiver_id)
    if receiver_col is not None:
        seg = tr.xy[pass_row:row_hi, receiver_col]
        ball = tr.ball[pass_row:row_hi]
        with np.errstate(invalid="ignore"):
            close = (
                np.hypot(seg[:, 0] - ball[:, 0], seg[:, 1] - ball[:, 1])
                <= RECEPTION_BALL_RADIUS_M
            )
        if close.any():
            return pass_row + int(np.argmax(close))
        passer_col = tr.col_of.get(event.player_id)
        if passer_col is not None:
            sp = tr.xy[pass_row, passer_col]
            rp = tr.xy[pass_row, receiver_col]
            if np.isfinite(sp).all() and np.isfinite(rp).all():
                dist = float(np.hypot(rp[0] - sp[0], rp[1] - sp[1]))
                est = int(round(dist / FALLBACK_PASS_SPEED_MPS * match.meta.frame_rate_hz))
                return min(pass_row + est, row_hi - 1)
    return pass_row


def _players_at(
    tracking: Tracking, row: int, cols: np.ndarray, flip: bool, meta: PitchMeta
) -> tuple[tuple[str, Point2], ...]:
    out = []
    for c in cols:
        x, y = tracking.xy[row, c]
        if math.isfinite(x):
            if flip:
                x, y = reflect_point(x, y, meta)
            out.append((tracking.player_ids[c], Point2(float(x), float(y))))
    return tuple(out)


def snapshot_pass(
    match: NormalizedMatch,
    event: MatchEvent,
    open_play_guard_events: int = OPEN_PLAY_GUARD_EVENTS,
) -> PassSnapshot:
    """Freeze a completed pass: endpoints plus opponents at release/reception.

    Output coordinates are orientation-normalized so the passing team
    attacks +x regardless of period.
    """
    if event.type is not EventType.PASS or event.outcome is not EventOutcome.COMPLETE:
        raise ValueError(f"event {event.event_id} is not a completed pass")
    if event.receiver_id is None:
        raise MissingPlayerError(f"pass {event.event_id} has no receiver_id")

    tr = match.tracking
    tol = SYNC_TOLERANCE_S * match.meta.frame_rate_hz
    pass_row = tr.row_of_frame(event.frame_id, tol)
    if pass_row < 0:
        raise SyncError(f"pass {event.event_id}: frame {event.frame_id} unresolvable")
    period_id = match.period_of_frame(int(tr.frame_ids[pass_row]))
    reception_row = _resolve_reception_row(match, event, pass_row, period_id)

    direction = match.attack_direction.get((event.team_id, period_id))
    if direction is None:
        raise OrientationError(
            f"attack direction unknown for team {event.team_id!r} period {period_id}"
        )
    flip = direction == "-x"

    passer_col = tr.col_of.get(event.player_id)
    receiver_col = tr.col_of.get(event.receiver_id)
    if passer_col is None or not np.isfinite(tr.xy[pass_row, passer_col, 0]):
        raise MissingPlayerError(
            f"passer {event.player_id} absent at frame {event.frame_id}"
        )
    if receiver_col is None or not np.isfinite(tr.xy[reception_row, receiver_col, 0]):
        raise MissingPlayerError(
            f"receiver {event.receiver_id} absent at reception frame"
        )

    sx, sy = tr.xy[pass_row, passer_col]
    rx, ry = tr.xy[reception_row, receiver_col]
    if flip:
        sx, sy = reflect_point(sx, sy, match.meta)
        rx, ry = reflect_point(rx, ry, match.meta)

    opponent_team = next(
        (t for t in match.roster.team_ids() if t != event.team_id), None
    )
    opp_cols = tr.team_cols.get(opponent_team, np.array([], dtype=np.int64))
    opponents = _players_at(tr, pass_row, opp_cols, flip, match.meta)
    opponents_at_reception = _players_at(tr, reception_row, opp_cols, flip, match.meta)

    return PassSnapshot(
        pass_event_id=event.event_id,
        team_id=event.team_id,
        passer_id=event.player_id,
        receiver_id=event.receiver_id,
        t_frame=int(tr.frame_ids[pass_row]),
        reception_frame=int(tr.frame_ids[reception_row]),
        s=Point2(float(sx), float(sy)),
        r=Point2(float(rx), float(ry)),
        opponents=opponents,
        opponents_at_reception=opponents_at_reception,
        goalkeeper_ids=match.roster.goalkeepers(opponent_team or ""),
        is_open_play=event_is_open_play(match, event, open_play_guard_events),
    )

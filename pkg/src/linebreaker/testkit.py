"""Synthetic matches with known ground truth, plus independent oracles.

The generator composes a match from short static "scenes". Each scene
positions the entire defending team (three vertical lines plus keeper)
and an acting passer/receiver so that every planted pass verdict holds
with wide margins: centroid crossings at least 2 m inside y-spans,
bypass distances at least 2 m inside/outside the radius, forwardness of
at least 5 m. Margins dwarf the position noise (sigma <= 0.3 m) and the
default smoothing window, so the ledger is exact by construction under
the default detection config.

The oracles re-derive verdicts from first principles and share no code
with the production modules: band crossings and pass-vector distances
come from dense sampling along the segment, clustering from literal
enumeration of contiguous partitions scored by the silhouette
definition. Shared conventions (singleton silhouette of 0, lexicographic
first-maximum tie-break, smaller-k preference) are part of the model
definition, not shared implementation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import PlanInfeasibleError
from .ingestion import (
    EventOutcome,
    EventType,
    MatchEvent,
    NormalizedMatch,
    PassSnapshot,
    PeriodInfo,
    PitchMeta,
    Roster,
    RosterEntry,
    Tracking,
)
from .lbp_detection import DetectConfig

PITCH_LENGTH_M = 105.0
PITCH_WIDTH_M = 68.0

# Canonical scene geometry (acting team attacks +x)
LINE_XS = (55.0, 70.0, 85.0)
LINE_JITTER = (-0.6, 0.0, 0.6, -0.3, 0.3)  # within-line x offsets, well under gap
SPAN_LO_Y = 14.0
SPAN_HI_Y = 54.0
CORRIDOR_Y = 34.0
KEEPER_X = 101.0

CROSS_SAMPLES = 10_000
DISTANCE_SAMPLES = 2_000


# ---------------------------------------------------------------------------
# Plans and ledgers


@dataclass(frozen=True)
class PlantedLbpSpec:
    """One guaranteed line-breaking pass."""

    lines_to_cross: int = 2
    bypass_count: int = 3
    forward_margin_m: float = 5.0


@dataclass(frozen=True)
class PlantedChainSpec:
    """One guaranteed chain; ``kind`` is 1 or 2, outcome is the shot outcome."""

    kind: int = 1
    outcome: str = "saved"


@dataclass(frozen=True)
class SyntheticPlan:
    seed: int = 0
    n_passes: int = 40
    planted_lbp_specs: tuple[PlantedLbpSpec, ...] = ()
    planted_chain_specs: tuple[PlantedChainSpec, ...] = ()
    n_decoys: int = 4
    noise_sigma_m: float = 0.2
    duration_s: float | None = None
    frame_rate_hz: float = 29.97
    match_id: str = "synthetic"


@dataclass(frozen=True)
class ExpectedPass:
    event_id: str
    team_id: str
    passer_id: str
    receiver_id: str
    is_lbp: bool
    lines_crossed: int
    bypassed_count: int
    open_play: bool
    note: str = ""


@dataclass(frozen=True)
class ExpectedChain:
    kind: int
    lbp_event_ids: tuple[str, ...]
    initiator_id: str
    connector_id: str | None
    finisher_id: str
    outcome: str  # chain-level outcome (goal/shot_on_target/shot_off_target/disallowed)
    shot_event_id: str


_CHAIN_OUTCOME_OF_SHOT = {
    "goal": "goal",
    "saved": "shot_on_target",
    "off_target": "shot_off_target",
    "disallowed": "disallowed",
}


@dataclass(frozen=True)
class GroundTruthLedger:
    match_id: str
    passes: tuple[ExpectedPass, ...]
    chains: tuple[ExpectedChain, ...]

    def expected_lbp_ids(self) -> frozenset[str]:
        return frozenset(p.event_id for p in self.passes if p.is_lbp)

    def to_json(self) -> str:
        obj = {
            "match_id": self.match_id,
            "passes": [vars(p) | {} for p in self.passes],
            "chains": [
                {
                    "kind": c.kind,
                    "lbp_event_ids": list(c.lbp_event_ids),
                    "initiator_id": c.initiator_id,
                    "connector_id": c.connector_id,
                    "finisher_id": c.finisher_id,
                    "outcome": c.outcome,
                    "shot_event_id": c.shot_event_id,
                }
                for c in self.chains
            ],
        }
        return json.dumps(obj, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "GroundTruthLedger":
        obj = json.loads(text)
        return GroundTruthLedger(
            match_id=obj["match_id"],
            passes=tuple(ExpectedPass(**p) for p in obj["passes"]),
            chains=tuple(
                ExpectedChain(
                    kind=c["kind"],
                    lbp_event_ids=tuple(c["lbp_event_ids"]),
                    initiator_id=c["initiator_id"],
                    connector_id=c["connector_id"],
                    finisher_id=c["finisher_id"],
                    outcome=c["outcome"],
                    shot_event_id=c["shot_event_id"],
                )
                for c in obj["chains"]
            ),
        )


# ---------------------------------------------------------------------------
# Scene construction


@dataclass
class _SceneEvent:
    rel_s: float
    type: EventType
    player: str  # slot name within the acting ("act:") or defending ("def:") team
    outcome: EventOutcome = EventOutcome.COMPLETE
    receiver: str | None = None
    end_rel_s: float | None = None
    tags: tuple[str, ...] = ()


@dataclass
class _Scene:
    """Static placements (canonical coords, attack = +x) plus timed events."""

    duration_s: float
    acting_positions: dict[str, tuple[float, float]]
    defending_positions: dict[str, tuple[float, float]]
    events: list[_SceneEvent]
    expected_passes: list[dict]
    expected_chains: list[dict] = field(default_factory=list)
    ball_path: list[tuple[float, str]] = field(default_factory=list)  # (rel_s, slot)


def _defense_lines(
    near_per_line: tuple[int, ...],
    far_per_line: tuple[int, ...] = (0, 0, 0),
    span_hi: float = SPAN_HI_Y,
) -> dict[str, tuple[float, float]]:
    """Ten outfielders in three lines plus keeper.

    Every line gets span anchors at y = SPAN_LO_Y and ``span_hi``.
    ``near_per_line`` members sit near the corridor (y = 34 +/- 5),
    inside the bypass radius minus margin of a mid-corridor pass;
    ``far_per_line`` members sit just above the low anchor, well outside
    radius plus margin. Anchors plus extras must total 10.
    """
    assert sum(near_per_line) + sum(far_per_line) + 6 == 10, "defense fields 10 outfielders"
    near_ys = (CORRIDOR_Y, CORRIDOR_Y - 5.0, CORRIDOR_Y + 5.0, CORRIDOR_Y - 3.0)
    far_ys = (SPAN_LO_Y + 2.0, SPAN_LO_Y + 4.0)
    positions: dict[str, tuple[float, float]] = {}
    slot = 0
    for lx, n_near, n_far in zip(LINE_XS, near_per_line, far_per_line):
        ys = [SPAN_LO_Y, span_hi, *near_ys[:n_near], *far_ys[:n_far]]
        for j, y in enumerate(ys):
            positions[f"def:{slot}"] = (lx + LINE_JITTER[j % len(LINE_JITTER)], y)
            slot += 1
    positions["def:gk"] = (KEEPER_X, CORRIDOR_Y)
    return positions


def _parked_teammates(exclude: int) -> dict[str, tuple[float, float]]:
    """Remaining acting outfielders parked far from every scene corridor."""
    positions = {}
    for i in range(exclude, 10):
        positions[f"act:{i}"] = (8.0 + 3.0 * i, 3.0 if i % 2 else 65.0)
    positions["act:gk"] = (4.0, CORRIDOR_Y)
    return positions


def _lbp_scene(spec: PlantedLbpSpec, note: str) -> _Scene:
    if not 1 <= spec.lines_to_cross <= 3:
        raise PlanInfeasibleError(f"lines_to_cross must be in [1, 3], got {spec.lines_to_cross}")
    if not 2 <= spec.bypass_count <= 4:
        raise PlanInfeasibleError(f"bypass_count must be in [2, 4], got {spec.bypass_count}")
    if spec.forward_margin_m < 5.0:
        raise PlanInfeasibleError("forward_margin_m must be >= 5 for clean planting")

    r_x = LINE_XS[spec.lines_to_cross - 1] + 7.0
    s_x = min(48.0, r_x - spec.forward_margin_m)
    if s_x < 6.0:
        raise PlanInfeasibleError(
            f"forward margin {spec.forward_margin_m} m does not fit the pitch"
        )
    # near members only in crossed lines so the bypass count is exact
    near = [0, 0, 0]
    far = [0, 0, 0]
    remaining = spec.bypass_count
    for li in range(spec.lines_to_cross):
        if LINE_XS[li] > s_x + 2.0 and LINE_XS[li] < r_x - 2.0:
            take = min(remaining, 4 - sum(near))
            near[li] = take
            remaining -= take
    if remaining:
        raise PlanInfeasibleError(f"cannot place {spec.bypass_count} bypassed opponents")
    # park unused slots where they cannot be bypassed: near the corridor in a
    # line outside the x-interval, or far from the corridor in a crossed line
    spare = 4 - sum(near)
    if spare:
        for li in range(2, -1, -1):
            if LINE_XS[li] > r_x + 4.0 or LINE_XS[li] < s_x - 4.0:
                near[li] += spare
                break
        else:
            far[0] = spare

    acting = {"act:0": (s_x, CORRIDOR_Y - 2.0), "act:1": (r_x, CORRIDOR_Y + 2.0)}
    acting.update(_parked_teammates(2))
    bypassed = sum(n for lx, n in zip(LINE_XS, near) if s_x + 2.0 < lx < r_x - 2.0)
    flight = math.hypot(r_x - s_x, 4.0) / 15.0
    events = [
        _SceneEvent(4.0, EventType.PASS, "act:0", receiver="act:1", end_rel_s=4.0 + flight),
        _SceneEvent(4.0 + flight, EventType.RECEPTION, "act:1"),
        _SceneEvent(6.0 + flight, EventType.INTERCEPTION, "def:gk"),
    ]
    expected = [
        {
            "event": 0,
            "is_lbp": True,
            "lines_crossed": spec.lines_to_cross,
            "bypassed_count": bypassed,
            "open_play": True,
            "note": note,
        }
    ]
    return _Scene(
        duration_s=8.0 + flight,
        acting_positions=acting,
        defending_positions=_defense_lines(tuple(near), tuple(far)),
        events=events,
        expected_passes=expected,
        ball_path=[(0.0, "act:0"), (4.0, "act:0"), (4.0 + flight, "act:1")],
    )


def _decoy_scene(kind: int) -> _Scene:
    """A pass engineered to fail exactly one stage with wide margins."""
    defense = _defense_lines((1, 2, 1))
    if kind == 0:  # backward pass through the block
        s, r = (73.0, CORRIDOR_Y - 2.0), (58.0, CORRIDOR_Y + 2.0)
        expected = {"is_lbp": False, "lines_crossed": 1, "bypassed_count": 2, "note": "backward"}
    elif kind == 1:  # forward but between lines: nothing to cross, nobody near
        s, r = (58.5, 10.0), (66.5, 6.0)
        expected = {"is_lbp": False, "lines_crossed": 0, "bypassed_count": 0, "note": "between lines"}
    elif kind == 2:  # crosses a centroid x outside the band's y-span
        defense = _defense_lines((2, 0, 2), span_hi=40.0)
        s, r = (62.0, 46.0), (77.0, 46.5)
        expected = {"is_lbp": False, "lines_crossed": 0, "bypassed_count": 1, "note": "outside span"}
    else:  # crosses one line but bypasses only one opponent
        defense = _defense_lines((1, 2, 1))
        s, r = (48.0, CORRIDOR_Y - 1.0), (62.0, CORRIDOR_Y + 1.0)
        expected = {"is_lbp": False, "lines_crossed": 1, "bypassed_count": 1, "note": "one bypassed"}
    acting = {"act:0": s, "act:1": r}
    acting.update(_parked_teammates(2))
    flight = math.hypot(r[0] - s[0], r[1] - s[1]) / 15.0
    events = [
        _SceneEvent(4.0, EventType.PASS, "act:0", receiver="act:1", end_rel_s=4.0 + flight),
        _SceneEvent(4.0 + flight, EventType.RECEPTION, "act:1"),
        _SceneEvent(6.0 + flight, EventType.INTERCEPTION, "def:gk"),
    ]
    expected_full = [{"event": 0, "open_play": True, **expected}]
    return _Scene(
        duration_s=8.0 + flight,
        acting_positions=acting,
        defending_positions=defense,
        events=events,
        expected_passes=expected_full,
        ball_path=[(0.0, "act:0"), (4.0, "act:0"), (4.0 + flight, "act:1")],
    )


def _chain1_scene(outcome: str) -> _Scene:
    """Planted line-break whose receiver shoots next."""
    scene = _lbp_scene(PlantedLbpSpec(lines_to_cross=2, bypass_count=3), note="chain1 lbp")
    shot_s = scene.events[1].rel_s + 1.5
    tags = ("xg:0.31",) if outcome == "goal" else ("xg:0.08",)
    scene.events = scene.events[:2] + [
        _SceneEvent(shot_s, EventType.SHOT, "act:1", outcome=EventOutcome(outcome), tags=tags),
        _SceneEvent(shot_s + 1.5, EventType.INTERCEPTION, "def:gk"),
    ]
    scene.duration_s = shot_s + 3.0
    scene.expected_chains = [
        {
            "kind": 1,
            "lbp_events": (0,),
            "initiator": "act:0",
            "connector": None,
            "finisher": "act:1",
            "outcome": outcome,
            "shot_event": 2,
        }
    ]
    return scene


def _chain2_scene(outcome: str) -> _Scene:
    """Two consecutive planted line-breaks concluding in a shot.

    First pass crosses the deepest line, the second crosses the middle
    line from the first receiver's feet; each bypasses the two near
    members of its own line.
    """
    defense = _defense_lines((2, 2, 0))
    s1, r1 = (46.0, 32.0), (61.0, 34.0)
    r2 = (77.0, 35.0)
    acting = {"act:0": s1, "act:1": r1, "act:2": r2, **_parked_teammates(3)}
    f1 = math.hypot(r1[0] - s1[0], r1[1] - s1[1]) / 15.0
    t_pass2 = 4.0 + f1 + 1.2
    f2 = math.hypot(r2[0] - r1[0], r2[1] - r1[1]) / 15.0
    t_shot = t_pass2 + f2 + 1.5
    tags = ("xg:0.07",) if outcome != "goal" else ("xg:0.24",)
    events = [
        _SceneEvent(4.0, EventType.PASS, "act:0", receiver="act:1", end_rel_s=4.0 + f1),
        _SceneEvent(4.0 + f1, EventType.RECEPTION, "act:1"),
        _SceneEvent(t_pass2, EventType.PASS, "act:1", receiver="act:2", end_rel_s=t_pass2 + f2),
        _SceneEvent(t_pass2 + f2, EventType.RECEPTION, "act:2"),
        _SceneEvent(t_shot, EventType.SHOT, "act:2", outcome=EventOutcome(outcome), tags=tags),
        _SceneEvent(t_shot + 1.5, EventType.INTERCEPTION, "def:gk"),
    ]
    expected_passes = [
        {"event": 0, "is_lbp": True, "lines_crossed": 1, "bypassed_count": 2,
         "open_play": True, "note": "chain2 first"},
        {"event": 2, "is_lbp": True, "lines_crossed": 1, "bypassed_count": 2,
         "open_play": True, "note": "chain2 second"},
    ]
    expected_chains = [
        {
            "kind": 2,
            "lbp_events": (0, 2),
            "initiator": "act:0",
            "connector": "act:1",
            "finisher": "act:2",
            "outcome": outcome,
            "shot_event": 4,
        }
    ]
    return _Scene(
        duration_s=t_shot + 3.0,
        acting_positions=acting,
        defending_positions=defense,
        events=events,
        expected_passes=expected_passes,
        expected_chains=expected_chains,
        ball_path=[(0.0, "act:0"), (4.0, "act:0"), (4.0 + f1, "act:1"),
                   (t_pass2, "act:1"), (t_pass2 + f2, "act:2")],
    )


def _filler_scene(n_passes: int, start_slot: int) -> _Scene:
    """Short deep-zone passes far from every defensive line: never line-breaking."""
    defense = _defense_lines((1, 2, 1))
    spots = [(10.0 + 4.0 * i, 20.0 + 4.0 * (i % 3)) for i in range(n_passes + 1)]
    acting = {f"act:{(start_slot + i) % 10}": spots[i] for i in range(n_passes + 1)}
    for i in range(10):
        acting.setdefault(f"act:{i}", (8.0 + 3.0 * i, 3.0 if i % 2 else 65.0))
    acting["act:gk"] = (4.0, CORRIDOR_Y)
    events = []
    expected = []
    t = 3.0
    for i in range(n_passes):
        a = f"act:{(start_slot + i) % 10}"
        b = f"act:{(start_slot + i + 1) % 10}"
        flight = math.hypot(spots[i + 1][0] - spots[i][0], spots[i + 1][1] - spots[i][1]) / 15.0
        events.append(_SceneEvent(t, EventType.PASS, a, receiver=b, end_rel_s=t + flight))
        events.append(_SceneEvent(t + flight, EventType.RECEPTION, b))
        expected.append(
            {"event": len(events) - 2, "is_lbp": False, "lines_crossed": 0,
             "bypassed_count": 0, "open_play": True, "note": "filler"}
        )
        t += flight + 1.2
    events.append(_SceneEvent(t + 0.5, EventType.INTERCEPTION, "def:gk"))
    ball = [(0.0, f"act:{start_slot % 10}")]
    tt = 3.0
    for i in range(n_passes):
        flight = math.hypot(spots[i + 1][0] - spots[i][0], spots[i + 1][1] - spots[i][1]) / 15.0
        a = f"act:{(start_slot + i) % 10}"
        b = f"act:{(start_slot + i + 1) % 10}"
        ball.append((tt, a))
        ball.append((tt + flight, b))
        tt += flight + 1.2
    return _Scene(
        duration_s=t + 2.5,
        acting_positions=acting,
        defending_positions=defense,
        events=events,
        expected_passes=expected,
        ball_path=ball,
    )


def _kickoff_scene() -> _Scene:
    """Restart plus two guarded passes: open-play gate must reject all three."""
    scene = _filler_scene(2, start_slot=0)
    kick = _SceneEvent(2.0, EventType.KICKOFF, "act:0", outcome=EventOutcome.COMPLETE)
    scene.events.insert(0, kick)
    for e in scene.expected_passes:
        e["event"] += 1
        e["open_play"] = False
        e["note"] = "guarded after restart"
    return scene


# ---------------------------------------------------------------------------
# Match assembly


def _slot_to_player(slot: str, acting: str, defending: str) -> str:
    team, name = slot.split(":")
    prefix = acting if team == "act" else defending
    return f"{prefix}_{name}"


def generate_match(plan: SyntheticPlan) -> tuple[NormalizedMatch, GroundTruthLedger]:
    """Build a schema-valid match whose detection ground truth is known."""
    if plan.noise_sigma_m > 0.3:
        raise PlanInfeasibleError("noise_sigma_m above 0.3 would erode planted margins")
    rng = np.random.default_rng(plan.seed)
    fps = plan.frame_rate_hz

    scenes: list[tuple[str, _Scene]] = []
    teams = ("home", "away")
    scene_no = 0

    def acting_team() -> str:
        return teams[scene_no % 2]

    for i, spec in enumerate(plan.planted_lbp_specs):
        scenes.append((acting_team(), _lbp_scene(spec, note=f"planted {i}")))
        scene_no += 1
    for spec in plan.planted_chain_specs:
        if spec.kind == 1:
            scenes.append((acting_team(), _chain1_scene(spec.outcome)))
        elif spec.kind == 2:
            scenes.append((acting_team(), _chain2_scene(spec.outcome)))
        else:
            raise PlanInfeasibleError(f"unknown chain kind {spec.kind}")
        scene_no += 1
    for i in range(plan.n_decoys):
        scenes.append((acting_team(), _decoy_scene(i % 4)))
        scene_no += 1

    n_planted_passes = sum(len(s.expected_passes) for _, s in scenes) + 4  # + kickoff scenes
    n_fillers = max(0, plan.n_passes - n_planted_passes)
    per_scene = 6
    while n_fillers > 0:
        take = min(per_scene, n_fillers)
        scenes.append((acting_team(), _filler_scene(take, start_slot=scene_no % 10)))
        scene_no += 1
        n_fillers -= take

    half = (len(scenes) + 1) // 2
    period_scenes = [scenes[:half], scenes[half:]]
    period_scenes[0].insert(0, ("home", _kickoff_scene()))
    period_scenes[1].insert(0, ("away", _kickoff_scene()))

    gap_s = 4.0
    needed = [
        sum(s.duration_s + gap_s for _, s in ps) + gap_s for ps in period_scenes
    ]
    if plan.duration_s is not None:
        n_scenes = sum(len(p) for p in period_scenes)
        if plan.duration_s < sum(needed):
            raise PlanInfeasibleError(
                f"duration {plan.duration_s} s cannot hold {n_scenes} scenes"
            )
        extra = (plan.duration_s - sum(needed)) / 2.0
        period_lengths = [needed[0] + extra, needed[1] + extra]
    else:
        period_lengths = needed

    # roster and columns: 11 + 11, no substitutions
    slots = [f"{i}" for i in range(10)] + ["gk"]
    player_ids = [f"{t}_{s}" for t in teams for s in slots]
    entries = tuple(
        RosterEntry(
            player_id=f"{t}_{s}",
            team_id=t,
            jersey=j + 1,
            role="goalkeeper" if s == "gk" else "outfield",
        )
        for t in teams
        for j, s in enumerate(slots)
    )
    roster = Roster(entries=entries)
    col_of = {pid: i for i, pid in enumerate(player_ids)}

    n_frames_p = [int(round(length * fps)) for length in period_lengths]
    n_frames = sum(n_frames_p)
    periods = (
        PeriodInfo(period_id=1, start_frame=0, end_frame=n_frames_p[0] - 1),
        PeriodInfo(period_id=2, start_frame=n_frames_p[0], end_frame=n_frames - 1),
    )
    directions = {
        ("home", 1): "+x",
        ("away", 1): "-x",
        ("home", 2): "-x",
        ("away", 2): "+x",
    }

    waypoints: dict[int, list[tuple[int, float, float]]] = {c: [] for c in range(22)}
    ball_wp: list[tuple[int, float, float]] = []
    events: list[MatchEvent] = []
    expected_passes: list[ExpectedPass] = []
    expected_chains: list[ExpectedChain] = []
    event_no = 0

    def world(pos: tuple[float, float], direction: str) -> tuple[float, float]:
        if direction == "+x":
            return pos
        return PITCH_LENGTH_M - pos[0], PITCH_WIDTH_M - pos[1]

    frame_cursor = 0
    for period_idx, ps in enumerate(period_scenes):
        period_id = period_idx + 1
        # spread scenes evenly across the period
        slack = period_lengths[period_idx] - sum(s.duration_s for _, s in ps)
        gap_p = slack / (len(ps) + 1) if ps else gap_s
        t_cursor = frame_cursor / fps + gap_p
        for acting, scene in ps:
            defending = "away" if acting == "home" else "home"
            direction = directions[(acting, period_id)]
            start_f = int(round(t_cursor * fps))
            end_f = int(round((t_cursor + scene.duration_s) * fps))

            placements: dict[str, tuple[float, float]] = {}
            for slot, pos in scene.acting_positions.items():
                placements[_slot_to_player(slot, acting, defending)] = world(pos, direction)
            for slot, pos in scene.defending_positions.items():
                placements[_slot_to_player(slot, acting, defending)] = world(pos, direction)
            for pid, pos in placements.items():
                waypoints[col_of[pid]].append((start_f, pos[0], pos[1]))
                waypoints[col_of[pid]].append((end_f, pos[0], pos[1]))

            scene_event_ids: dict[int, str] = {}
            for ei, se in enumerate(scene.events):
                event_no += 1
                eid = f"e{event_no:05d}"
                scene_event_ids[ei] = eid
                frame = start_f + int(round(se.rel_s * fps))
                end_frame = (
                    start_f + int(round(se.end_rel_s * fps))
                    if se.end_rel_s is not None
                    else None
                )
                events.append(
                    MatchEvent(
                        event_id=eid,
                        type=se.type,
                        team_id=acting if se.player.startswith("act:") else defending,
                        player_id=_slot_to_player(se.player, acting, defending),
                        frame_id=frame,
                        outcome=se.outcome,
                        receiver_id=(
                            _slot_to_player(se.receiver, acting, defending)
                            if se.receiver
                            else None
                        ),
                        end_frame_id=end_frame,
                        tags=frozenset(se.tags),
                    )
                )
            for exp in scene.expected_passes:
                ev = events[len(events) - len(scene.events) + exp["event"]]
                expected_passes.append(
                    ExpectedPass(
                        event_id=ev.event_id,
                        team_id=ev.team_id,
                        passer_id=ev.player_id,
                        receiver_id=ev.receiver_id or "",
                        is_lbp=exp["is_lbp"],
                        lines_crossed=exp["lines_crossed"],
                        bypassed_count=exp["bypassed_count"],
                        open_play=exp["open_play"],
                        note=exp["note"],
                    )
                )
            for exp in scene.expected_chains:
                expected_chains.append(
                    ExpectedChain(
                        kind=exp["kind"],
                        lbp_event_ids=tuple(scene_event_ids[i] for i in exp["lbp_events"]),
                        initiator_id=_slot_to_player(exp["initiator"], acting, defending),
                        connector_id=(
                            _slot_to_player(exp["connector"], acting, defending)
                            if exp["connector"]
                            else None
                        ),
                        finisher_id=_slot_to_player(exp["finisher"], acting, defending),
                        outcome=_CHAIN_OUTCOME_OF_SHOT[exp["outcome"]],
                        shot_event_id=scene_event_ids[exp["shot_event"]],
                    )
                )
            for rel_s, slot in scene.ball_path:
                pos = scene.acting_positions.get(slot) or scene.defending_positions[slot]
                wx, wy = world(pos, direction)
                ball_wp.append((start_f + int(round(rel_s * fps)), wx, wy))

            t_cursor += scene.duration_s + gap_p
        frame_cursor += n_frames_p[period_idx]

    # anchor every player at match start/end so interpolation is total
    base_y = {c: 6.0 + 2.6 * (c % 22) for c in range(22)}
    for c in range(22):
        pid = player_ids[c]
        base_x = 20.0 if pid.startswith("home") else 85.0
        wps = waypoints[c]
        if not wps or wps[0][0] > 0:
            wps.insert(0, (0, base_x, base_y[c]))
        if wps[-1][0] < n_frames - 1:
            wps.append((n_frames - 1, wps[-1][1], wps[-1][2]))
    if not ball_wp or ball_wp[0][0] > 0:
        ball_wp.insert(0, (0, 52.5, 34.0))
    if ball_wp[-1][0] < n_frames - 1:
        ball_wp.append((n_frames - 1, ball_wp[-1][1], ball_wp[-1][2]))

    grid = np.arange(n_frames, dtype=np.float64)
    xy = np.empty((n_frames, 22, 2), dtype=np.float64)
    for c in range(22):
        wps = sorted(waypoints[c])
        f = np.array([w[0] for w in wps], dtype=np.float64)
        xs = np.array([w[1] for w in wps], dtype=np.float64)
        ys = np.array([w[2] for w in wps], dtype=np.float64)
        xy[:, c, 0] = np.interp(grid, f, xs)
        xy[:, c, 1] = np.interp(grid, f, ys)
    ball_wp.sort()
    bf = np.array([w[0] for w in ball_wp], dtype=np.float64)
    ball = np.empty((n_frames, 2), dtype=np.float64)
    ball[:, 0] = np.interp(grid, bf, np.array([w[1] for w in ball_wp]))
    ball[:, 1] = np.interp(grid, bf, np.array([w[2] for w in ball_wp]))

    if plan.noise_sigma_m > 0:
        chunk = 200_000
        for lo in range(0, n_frames, chunk):
            hi = min(lo + chunk, n_frames)
            xy[lo:hi] += rng.normal(0.0, plan.noise_sigma_m, size=xy[lo:hi].shape)
            ball[lo:hi] += rng.normal(0.0, plan.noise_sigma_m * 0.5, size=ball[lo:hi].shape)
    np.round(xy, 3, out=xy)
    np.round(ball, 3, out=ball)
    np.clip(xy[..., 0], -4.0, PITCH_LENGTH_M + 4.0, out=xy[..., 0])
    np.clip(xy[..., 1], -4.0, PITCH_WIDTH_M + 4.0, out=xy[..., 1])

    tracking = Tracking(
        frame_ids=np.arange(n_frames, dtype=np.int64),
        times=np.round(grid / fps, 4),
        xy=xy,
        ball=ball,
        player_ids=tuple(player_ids),
        team_ids=tuple(pid.split("_")[0] for pid in player_ids),
    )
    meta = PitchMeta(
        length_m=PITCH_LENGTH_M,
        width_m=PITCH_WIDTH_M,
        frame_rate_hz=fps,
        periods=periods,
        match_id=plan.match_id,
    )
    match = NormalizedMatch(
        meta=meta,
        tracking=tracking,
        events=tuple(sorted(events, key=lambda e: e.frame_id)),
        roster=roster,
        attack_direction={
            (t, p.period_id): directions[(t, p.period_id)] for t in teams for p in periods
        },
    )
    ledger = GroundTruthLedger(
        match_id=plan.match_id,
        passes=tuple(expected_passes),
        chains=tuple(expected_chains),
    )
    return match, ledger


def write_fixture(plan: SyntheticPlan, out_dir: str | Path) -> GroundTruthLedger:
    """Generate and save a match directory plus its ledger.json."""
    from .ingestion import save_match

    match, ledger = generate_match(plan)
    out = Path(out_dir)
    save_match(match, out)
    (out / "ledger.json").write_text(ledger.to_json(), encoding="utf-8")
    return ledger


# ---------------------------------------------------------------------------
# Oracles (independent re-derivations; no production code paths)


def silhouette_by_definition(xs: list[float], clusters: list[list[int]]) -> float:
    """Mean silhouette straight from the definition, via pairwise distances."""
    n = len(xs)
    total = 0.0
    for ci, members in enumerate(clusters):
        for i in members:
            if len(members) == 1:
                total += 0.0
                continue
            a = sum(abs(xs[i] - xs[j]) for j in members if j != i) / (len(members) - 1)
            b = min(
                sum(abs(xs[i] - xs[j]) for j in other) / len(other)
                for cj, other in enumerate(clusters)
                if cj != ci
            )
            m = max(a, b)
            total += 0.0 if m == 0 else (b - a) / m
    return total / n


def oracle_cluster_1d(
    xs: list[float],
    k_candidates: tuple[int, ...] = (2, 3, 4),
    min_spread_m: float = 1.0,
) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Exhaustive contiguous-partition clustering of at most 12 values.

    Returns (k, partition) with clusters as tuples of input indices in
    ascending-x order. Tie-breaks match the production conventions:
    candidates scanned in ascending k, partitions in lexicographic
    boundary order, strictly-greater silhouette to replace.
    """
    n = len(xs)
    if n > 12:
        raise ValueError("oracle_cluster_1d is exhaustive; use at most 12 points")
    order = sorted(range(n), key=lambda i: (xs[i], i))
    if n == 0:
        raise ValueError("empty input")
    if max(xs) - min(xs) < min_spread_m:
        return 1, (tuple(order),)

    best: tuple[float, int, tuple[tuple[int, ...], ...]] | None = None
    for k in sorted(set(k_candidates)):
        if not 2 <= k <= n:
            continue
        for bounds in combinations(range(1, n), k - 1):
            edges = (0, *bounds, n)
            clusters = [order[edges[c] : edges[c + 1]] for c in range(k)]
            score = silhouette_by_definition(list(xs), clusters)
            if best is None or score > best[0]:
                best = (score, k, tuple(tuple(c) for c in clusters))
    if best is None:
        return 1, (tuple(order),)
    return best[1], best[2]


def sampled_band_crossing(
    sx: float, sy: float, rx: float, ry: float,
    x_centroid: float, y_min: float, y_max: float,
    n_samples: int = CROSS_SAMPLES,
) -> bool:
    """Dense-sampling re-derivation of the band-crossing predicate.

    The segment is sampled uniformly; a crossing is a sample within one
    sample-gap of the band line with its y inside the (slackened) span.
    Exact off tangent cases; the differential suites carve those out.
    """
    lo, hi = min(sx, rx), max(sx, rx)
    if not lo < x_centroid < hi:
        return False
    t = np.linspace(0.0, 1.0, n_samples)
    px = sx + t * (rx - sx)
    py = sy + t * (ry - sy)
    eps = max(math.hypot(rx - sx, ry - sy) / (n_samples - 1), 1e-9)
    near = np.abs(px - x_centroid) <= eps
    return bool(np.any(near & (py >= y_min - eps) & (py <= y_max + eps)))


def sampled_segment_distance(
    px: float, py: float, sx: float, sy: float, rx: float, ry: float,
    n_samples: int = DISTANCE_SAMPLES,
) -> float:
    """Min distance to the segment by dense sampling (upper bound, gap/2 tight)."""
    t = np.linspace(0.0, 1.0, n_samples)
    qx = sx + t * (rx - sx)
    qy = sy + t * (ry - sy)
    return float(np.min(np.hypot(px - qx, py - qy)))


def oracle_lbp(snapshot: PassSnapshot, config: DetectConfig | None = None) -> bool:
    """Independent verdict: oracle clustering plus sampled geometry plus filters."""
    config = config or DetectConfig()
    opponents = list(snapshot.opponents)
    clustered = opponents
    if config.shape.exclude_goalkeeper:
        clustered = [(pid, p) for pid, p in opponents if pid not in snapshot.goalkeeper_ids]
    if not clustered:
        return False
    xs = [p.x for _, p in clustered]
    ys = [p.y for _, p in clustered]
    _, partition = oracle_cluster_1d(
        xs, config.shape.k_candidates, config.shape.min_spread_m
    )
    sx, sy, rx, ry = snapshot.s.x, snapshot.s.y, snapshot.r.x, snapshot.r.y
    crossed = 0
    for members in partition:
        x_c = sum(xs[i] for i in members) / len(members)
        y_lo = min(ys[i] for i in members)
        y_hi = max(ys[i] for i in members)
        if sampled_band_crossing(sx, sy, rx, ry, x_c, y_lo, y_hi):
            crossed += 1
    if crossed < 1:
        return False
    lo, hi = min(sx, rx), max(sx, rx)
    bypassed = sum(
        1
        for _, p in opponents
        if lo < p.x < hi
        and sampled_segment_distance(p.x, p.y, sx, sy, rx, ry) <= config.bypass_radius_m
    )
    if bypassed < 2:
        return False
    if not rx > sx + config.min_forward_m:
        return False
    return snapshot.is_open_play


# ---------------------------------------------------------------------------
# Batch oracle kernels for the large differential suites


def sampled_crossings_batch(
    segments: np.ndarray,  # (n, 4): sx, sy, rx, ry
    bands: np.ndarray,  # (n, max_k, 3): x_centroid, y_min, y_max
    band_mask: np.ndarray,  # (n, max_k) bool
    n_samples: int = CROSS_SAMPLES,
    chunk: int = 256,
) -> np.ndarray:
    """(n, max_k) crossing verdicts via chunked dense sampling."""
    n, max_k = band_mask.shape
    out = np.zeros((n, max_k), dtype=bool)
    t = np.linspace(0.0, 1.0, n_samples)
    for lo_i in range(0, n, chunk):
        hi_i = min(lo_i + chunk, n)
        seg = segments[lo_i:hi_i]
        sx, sy = seg[:, 0:1], seg[:, 1:2]
        rx, ry = seg[:, 2:3], seg[:, 3:4]
        px = sx + t[None, :] * (rx - sx)
        py = sy + t[None, :] * (ry - sy)
        seg_len = np.hypot(rx - sx, ry - sy)
        eps = np.maximum(seg_len / (n_samples - 1), 1e-9)
        x_lo = np.minimum(sx, rx)
        x_hi = np.maximum(sx, rx)
        for k in range(max_k):
            xc = bands[lo_i:hi_i, k, 0:1]
            y0 = bands[lo_i:hi_i, k, 1:2]
            y1 = bands[lo_i:hi_i, k, 2:3]
            strict = (x_lo < xc) & (xc < x_hi)
            near = np.abs(px - xc) <= eps
            hit = near & (py >= y0 - eps) & (py <= y1 + eps)
            out[lo_i:hi_i, k] = band_mask[lo_i:hi_i, k] & strict[:, 0] & hit.any(axis=1)
    return out


def sampled_bypass_batch(
    segments: np.ndarray,  # (n, 4)
    opponents: np.ndarray,  # (n, max_o, 2)
    opp_mask: np.ndarray,  # (n, max_o) bool
    radius_m: float,
    n_samples: int = DISTANCE_SAMPLES,
    chunk: int = 512,
) -> np.ndarray:
    """(n,) bypassed-opponent counts via chunked dense sampling."""
    n, max_o = opp_mask.shape
    out = np.zeros(n, dtype=np.int64)
    t = np.linspace(0.0, 1.0, n_samples)
    r2 = radius_m * radius_m
    for lo_i in range(0, n, chunk):
        hi_i = min(lo_i + chunk, n)
        seg = segments[lo_i:hi_i]
        sx, sy = seg[:, 0:1], seg[:, 1:2]
        rx, ry = seg[:, 2:3], seg[:, 3:4]
        px = sx + t[None, :] * (rx - sx)
        py = sy + t[None, :] * (ry - sy)
        x_lo = np.minimum(sx, rx)[:, 0]
        x_hi = np.maximum(sx, rx)[:, 0]
        counts = np.zeros(hi_i - lo_i, dtype=np.int64)
        for o in range(max_o):
            ox = opponents[lo_i:hi_i, o, 0]
            oy = opponents[lo_i:hi_i, o, 1]
            d2 = (ox[:, None] - px) ** 2 + (oy[:, None] - py) ** 2
            within = d2.min(axis=1) <= r2
            counts += (
                opp_mask[lo_i:hi_i, o] & (ox > x_lo) & (ox < x_hi) & within
            ).astype(np.int64)
        out[lo_i:hi_i] = counts
    return out

"""Command-line pipeline: detect, report, validate, generate, selftest.

Batch layout: the detect input directory holds one subdirectory per
match with the four normalized files; outputs mirror that layout. All
outputs are byte-deterministic for fixed inputs and config, independent
of worker count: each match's files depend only on that match, and the
cross-match summary is written in sorted order by the parent process.

Config file grammar (flat, TOML-like): one ``key = value`` per line,
``#`` comments, blank lines ignored. Values: integers, floats,
``true``/``false``, quoted or bare strings, and ``[v, v, ...]`` lists.
Unknown keys are rejected. Environment variables never override config.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import testkit
from .aggregation import EntityStats, aggregate, top_n
from .chains import ChainConfig, ChainKind, ChainOutcome, ChainRecord, detect_chains
from .errors import LinebreakerError, MissingInputError, SchemaError
from .ingestion import (
    DEFAULT_SMOOTHING_WINDOW,
    OPEN_PLAY_GUARD_EVENTS,
    EventOutcome,
    EventType,
    load_match_dir,
    smooth_positions,
)
from .lbp_detection import (
    DEFAULT_BYPASS_RADIUS_M,
    DEFAULT_MIN_FORWARD_M,
    DetectConfig,
    LbpRecord,
    detect_all,
)
from .team_shape import ShapeConfig, TeamShape, ClusterLine

MATCH_FILES = ("meta.json", "tracking.jsonl", "events.json", "roster.json")


@dataclass(frozen=True)
class RunConfig:
    """Resolved pipeline configuration; defaults equal the module defaults."""

    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
    detect: DetectConfig = field(default_factory=DetectConfig)
    chain: ChainConfig = field(default_factory=ChainConfig)
    output_format: str = "both"  # csv | json | both
    jobs: int = 0  # 0 means one worker per logical core
    per90: bool = False


# ---------------------------------------------------------------------------
# Config file


def _parse_scalar(raw: str):
    raw = raw.strip()
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        return [_parse_scalar(v) for v in inner.split(",")] if inner else []
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    low = raw.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


_CONFIG_KEYS = {
    "smoothing_window",
    "exclude_goalkeeper",
    "k_candidates",
    "min_spread_m",
    "linkage",
    "bypass_radius_m",
    "min_forward_m",
    "open_play_guard_events",
    "conclusion_lookahead_events",
    "format",
    "jobs",
    "per90",
}


def load_config(path: str | Path | None) -> RunConfig:
    """Parse the flat key file into a RunConfig; None yields all defaults."""
    values: dict = {}
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise SchemaError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise SchemaError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_scalar(raw)
    shape = ShapeConfig(
        exclude_goalkeeper=values.get("exclude_goalkeeper", True),
        k_candidates=tuple(values.get("k_candidates", (2, 3, 4))),
        min_spread_m=float(values.get("min_spread_m", 1.0)),
        linkage=values.get("linkage", "ward"),
    )
    detect = DetectConfig(
        bypass_radius_m=float(values.get("bypass_radius_m", DEFAULT_BYPASS_RADIUS_M)),
        min_forward_m=float(values.get("min_forward_m", DEFAULT_MIN_FORWARD_M)),
        open_play_guard_events=int(
            values.get("open_play_guard_events", OPEN_PLAY_GUARD_EVENTS)
        ),
        shape=shape,
    )
    chain = ChainConfig(
        conclusion_lookahead_events=int(values.get("conclusion_lookahead_events", 1))
    )
    fmt = values.get("format", "both")
    if fmt not in ("csv", "json", "both"):
        raise SchemaError(f"config format must be csv|json|both, got {fmt!r}")
    return RunConfig(
        smoothing_window=int(values.get("smoothing_window", DEFAULT_SMOOTHING_WINDOW)),
        detect=detect,
        chain=chain,
        output_format=fmt,
        jobs=int(values.get("jobs", 0)),
        per90=bool(values.get("per90", False)),
    )


# ---------------------------------------------------------------------------
# Serialization of records and chains


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _shape_to_dict(shape: TeamShape | None):
    if shape is None:
        return None
    return {
        "k": shape.k,
        "silhouette": shape.silhouette,
        "lines": [
            {
                "cluster_id": line.cluster_id,
                "x_centroid": line.x_centroid,
                "y_min": line.y_min,
                "y_max": line.y_max,
                "member_ids": list(line.member_ids),
            }
            for line in shape.lines
        ],
    }


def _shape_from_dict(obj) -> TeamShape | None:
    if obj is None:
        return None
    return TeamShape(
        lines=tuple(
            ClusterLine(
                cluster_id=l["cluster_id"],
                x_centroid=l["x_centroid"],
                y_min=l["y_min"],
                y_max=l["y_max"],
                member_ids=tuple(l["member_ids"]),
            )
            for l in obj["lines"]
        ),
        k=obj["k"],
        silhouette=obj["silhouette"],
    )


def record_to_dict(r: LbpRecord) -> dict:
    return {
        "match_id": r.match_id,
        "pass_event_id": r.pass_event_id,
        "team_id": r.team_id,
        "passer_id": r.passer_id,
        "receiver_id": r.receiver_id,
        "frame_id": r.frame_id,
        "is_open_play": r.is_open_play,
        "is_lbp": r.is_lbp,
        "lines_crossed": r.lines_crossed,
        "bypassed_count": r.bypassed_count,
        "crossed_cluster_ids": list(r.crossed_cluster_ids),
        "shape": _shape_to_dict(r.shape),
        "sbr": r.sbr,
        "sbr_flagged": r.sbr_flagged,
        "verticality": r.verticality,
        "pass_distance_m": r.pass_distance_m,
        "valid": r.valid,
        "error": r.error,
    }


def record_from_dict(obj: dict) -> LbpRecord:
    return LbpRecord(
        match_id=obj["match_id"],
        pass_event_id=obj["pass_event_id"],
        team_id=obj["team_id"],
        passer_id=obj["passer_id"],
        receiver_id=obj["receiver_id"],
        frame_id=obj["frame_id"],
        is_open_play=obj["is_open_play"],
        is_lbp=obj["is_lbp"],
        lines_crossed=obj["lines_crossed"],
        bypassed_count=obj["bypassed_count"],
        crossed_cluster_ids=tuple(obj["crossed_cluster_ids"]),
        shape=_shape_from_dict(obj.get("shape")),
        sbr=obj["sbr"],
        sbr_flagged=obj["sbr_flagged"],
        verticality=obj["verticality"],
        pass_distance_m=obj["pass_distance_m"],
        valid=obj["valid"],
        error=obj["error"],
    )


def chain_to_dict(c: ChainRecord) -> dict:
    return {
        "kind": c.kind.value,
        "match_id": c.match_id,
        "possession_id": c.possession_id,
        "lbp_event_ids": list(c.lbp_event_ids),
        "initiator_id": c.initiator_id,
        "connector_id": c.connector_id,
        "finisher_id": c.finisher_id,
        "shot_event_id": c.shot_event_id,
        "outcome": c.outcome.value,
        "team_id": c.team_id,
        "xg": c.xg,
        "cumulative_sbr": c.cumulative_sbr,
        "flagged": c.flagged,
    }


def chain_from_dict(obj: dict) -> ChainRecord:
    return ChainRecord(
        kind=ChainKind(obj["kind"]),
        match_id=obj["match_id"],
        possession_id=obj["possession_id"],
        lbp_event_ids=tuple(obj["lbp_event_ids"]),
        initiator_id=obj["initiator_id"],
        connector_id=obj["connector_id"],
        finisher_id=obj["finisher_id"],
        shot_event_id=obj["shot_event_id"],
        outcome=ChainOutcome(obj["outcome"]),
        team_id=obj["team_id"],
        xg=obj["xg"],
        cumulative_sbr=obj["cumulative_sbr"],
        flagged=obj["flagged"],
    )


_RECORD_CSV_COLUMNS = (
    "match_id", "pass_event_id", "team_id", "passer_id", "receiver_id",
    "frame_id", "is_open_play", "is_lbp", "lines_crossed", "bypassed_count",
    "crossed_cluster_ids", "k", "sbr", "sbr_flagged", "verticality",
    "pass_distance_m", "valid", "error",
)

_CHAIN_CSV_COLUMNS = (
    "kind", "match_id", "possession_id", "lbp_event_ids", "initiator_id",
    "connector_id", "finisher_id", "shot_event_id", "outcome", "team_id",
    "xg", "cumulative_sbr", "flagged",
)


def _write_csv(path: Path, columns: tuple[str, ...], rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def write_records(records: list[LbpRecord], out_dir: Path, fmt: str) -> None:
    dicts = [record_to_dict(r) for r in records]
    if fmt in ("json", "both"):
        _write_json(out_dir / "lbp_records.json", dicts)
    if fmt in ("csv", "both"):
        rows = []
        for d in dicts:
            row = dict(d)
            row["crossed_cluster_ids"] = ";".join(str(i) for i in d["crossed_cluster_ids"])
            row["k"] = d["shape"]["k"] if d["shape"] else None
            rows.append(row)
        _write_csv(out_dir / "lbp_records.csv", _RECORD_CSV_COLUMNS, rows)


def write_chains(chains: list[ChainRecord], out_dir: Path, fmt: str) -> None:
    dicts = [chain_to_dict(c) for c in chains]
    if fmt in ("json", "both"):
        _write_json(out_dir / "chains.json", dicts)
    if fmt in ("csv", "both"):
        rows = []
        for d in dicts:
            row = dict(d)
            row["lbp_event_ids"] = ";".join(d["lbp_event_ids"])
            rows.append(row)
        _write_csv(out_dir / "chains.csv", _CHAIN_CSV_COLUMNS, rows)


# ---------------------------------------------------------------------------
# Pipeline


def process_match(match_dir: str | Path, config: RunConfig):
    """load -> smooth -> detect -> chains for one match directory."""
    match = load_match_dir(match_dir)
    match = smooth_positions(match, config.smoothing_window)
    records = detect_all(match, config.detect)
    ch1, ch2 = detect_chains(match, records, config.chain)
    return records, ch1 + ch2


def _detect_one(match_dir: str, out_dir: str, config: RunConfig) -> dict:
    """Worker: process one match and write its outputs (isolated failures)."""
    name = Path(match_dir).name
    try:
        records, chains = process_match(match_dir, config)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_records(records, out, config.output_format)
        write_chains(chains, out, config.output_format)
        return {
            "match": name,
            "status": "ok",
            "n_passes": len(records),
            "n_lbps": sum(1 for r in records if r.is_lbp),
            "n_chains": len(chains),
        }
    except (LinebreakerError, OSError, ValueError) as exc:
        return {"match": name, "status": "error", "error": f"{type(exc).__name__}: {exc}"}


def _match_dirs(input_dir: Path) -> list[Path]:
    return sorted(
        d for d in input_dir.iterdir() if d.is_dir() and (d / "meta.json").exists()
    )


@click.group()
def main() -> None:
    """Line-breaking pass detection and reporting."""


@main.command("detect")
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=None, help="worker processes (default: config or cores)")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "both"]), default=None)
def cmd_detect(input_dir: str, config_path: str | None, out_dir: str, jobs: int | None, fmt: str | None):
    """Detect line-breaking passes and chains for every match in INPUT_DIR."""
    try:
        config = load_config(config_path)
    except (LinebreakerError, OSError) as exc:
        raise click.UsageError(str(exc)) from exc
    if fmt is not None:
        config = RunConfig(
            smoothing_window=config.smoothing_window,
            detect=config.detect,
            chain=config.chain,
            output_format=fmt,
            jobs=config.jobs,
            per90=config.per90,
        )
    n_jobs = jobs if jobs is not None else config.jobs
    if n_jobs <= 0:
        n_jobs = os.cpu_count() or 1

    matches = _match_dirs(Path(input_dir))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results: list[dict] = []
    if len(matches) <= 1 or n_jobs == 1:
        for d in matches:
            results.append(_detect_one(str(d), str(out / d.name), config))
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            futures = [
                pool.submit(_detect_one, str(d), str(out / d.name), config)
                for d in matches
            ]
            results = [f.result() for f in futures]
    results.sort(key=lambda r: r["match"])
    summary = {
        "matches": results,
        "n_ok": sum(1 for r in results if r["status"] == "ok"),
        "n_error": sum(1 for r in results if r["status"] == "error"),
    }
    _write_json(out / "summary.json", summary)
    click.echo(json.dumps(summary, indent=2))
    sys.exit(0 if summary["n_error"] == 0 else 1)


def _stats_to_dict(s: EntityStats) -> dict:
    return {
        "entity_kind": s.entity_kind,
        "entity_id": s.entity_id,
        "team_id": s.team_id,
        "lbp_count": s.lbp_count,
        "lines_broken_total": s.lines_broken_total,
        "cumulative_sbr": s.cumulative_sbr,
        "positive_sbr_pct": s.positive_sbr_pct,
        "avg_pass_distance": s.avg_pass_distance,
        "avg_verticality": s.avg_verticality,
        "lbpch1_count": s.lbpch1_count,
        "lbpch2_count": s.lbpch2_count,
        "flagged_count": s.flagged_count,
        "lbp_per90": s.lbp_per90,
        "cumulative_sbr_per90": s.cumulative_sbr_per90,
    }


_STATS_COLUMNS = (
    "entity_kind", "entity_id", "team_id", "lbp_count", "lines_broken_total",
    "cumulative_sbr", "positive_sbr_pct", "avg_pass_distance", "avg_verticality",
    "lbpch1_count", "lbpch2_count", "flagged_count", "lbp_per90",
    "cumulative_sbr_per90",
)


@main.command("report")
@click.argument("records_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--per90", is_flag=True, default=False)
def cmd_report(records_dir: str, out_dir: str, per90: bool):
    """Aggregate detect outputs in RECORDS_DIR into team/player tables."""
    root = Path(records_dir)
    record_files = sorted(root.glob("*/lbp_records.json"))
    if (root / "lbp_records.json").exists():
        record_files.insert(0, root / "lbp_records.json")
    if not record_files:
        err = {"error": "MissingInputError", "detail": f"no lbp_records.json under {root}"}
        click.echo(json.dumps(err, indent=2))
        sys.exit(1)
    records: list[LbpRecord] = []
    chains: list[ChainRecord] = []
    try:
        for rf in record_files:
            records.extend(record_from_dict(o) for o in json.loads(rf.read_text()))
            cf = rf.with_name("chains.json")
            if not cf.exists():
                raise MissingInputError(f"{cf} missing alongside {rf.name}")
            chains.extend(chain_from_dict(o) for o in json.loads(cf.read_text()))
    except (KeyError, json.JSONDecodeError, MissingInputError) as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "detail": str(exc)}, indent=2))
        sys.exit(1)

    teams, players = aggregate(records, chains, per90=per90)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "team_stats.csv", _STATS_COLUMNS, [_stats_to_dict(s) for s in teams])
    _write_csv(out / "player_stats.csv", _STATS_COLUMNS, [_stats_to_dict(s) for s in players])
    _write_json(out / "team_stats.json", [_stats_to_dict(s) for s in teams])
    _write_json(out / "player_stats.json", [_stats_to_dict(s) for s in players])

    ch1 = [c for c in chains if c.kind is ChainKind.LBPCH1]
    ch2 = [c for c in chains if c.kind is ChainKind.LBPCH2]
    ch_cols = (
        "match", "possession", "initiator", "connector", "finisher",
        "outcome", "xg", "cumulative_sbr", "lbp_event_ids",
    )

    def chain_row(c: ChainRecord) -> dict:
        return {
            "match": c.match_id,
            "possession": c.possession_id,
            "initiator": c.initiator_id,
            "connector": c.connector_id,
            "finisher": c.finisher_id,
            "outcome": c.outcome.value,
            "xg": c.xg,
            "cumulative_sbr": c.cumulative_sbr,
            "lbp_event_ids": ";".join(c.lbp_event_ids),
        }

    _write_csv(out / "lbpch1.csv", ch_cols, [chain_row(c) for c in ch1])
    _write_csv(out / "lbpch2.csv", ch_cols, [chain_row(c) for c in ch2])

    _write_json(
        out / "plot_team_volume.json",
        {
            "kind": "team_lbp_volume",
            "axes": {"x": "rank", "y": "lbp_count", "size": "lines_broken_total"},
            "points": [
                {
                    "entity_id": s.entity_id,
                    "rank": i + 1,
                    "lbp_count": s.lbp_count,
                    "lines_broken_total": s.lines_broken_total,
                }
                for i, s in enumerate(teams)
            ],
        },
    )
    top_players = top_n(players, "lbp_count", 50)
    _write_json(
        out / "plot_player_space.json",
        {
            "kind": "player_space_effectiveness",
            "axes": {
                "x": "positive_sbr_pct",
                "y": "cumulative_sbr",
                "size": "avg_pass_distance",
                "color": "avg_verticality",
            },
            "points": [
                {
                    "entity_id": s.entity_id,
                    "positive_sbr_pct": s.positive_sbr_pct,
                    "cumulative_sbr": s.cumulative_sbr,
                    "avg_pass_distance": s.avg_pass_distance,
                    "avg_verticality": s.avg_verticality,
                    "lbp_count": s.lbp_count,
                }
                for s in top_players
            ],
        },
    )
    click.echo(f"wrote reports for {len(records)} records / {len(chains)} chains to {out}")
    sys.exit(0)


# ---------------------------------------------------------------------------
# validate


def _validate_match_dir(d: Path) -> list[str]:
    problems: list[str] = []
    for name in MATCH_FILES:
        if not (d / name).exists():
            problems.append(f"{d / name}: missing file")
    if problems:
        return problems

    try:
        meta = json.loads((d / "meta.json").read_text())
        for key in ("pitch_length_m", "pitch_width_m", "frame_rate_hz", "periods"):
            if key not in meta:
                problems.append(f"{d / 'meta.json'}: missing key {key!r}")
    except json.JSONDecodeError as exc:
        problems.append(f"{d / 'meta.json'}:{exc.lineno}: invalid JSON")
        meta = {}

    known_players: set[str] = set()
    try:
        roster = json.loads((d / "roster.json").read_text())
        for i, e in enumerate(roster):
            for key in ("player_id", "team_id", "jersey", "role"):
                if key not in e:
                    problems.append(f"{d / 'roster.json'}: entry {i}: missing {key!r}")
            if e.get("role") not in ("goalkeeper", "outfield"):
                problems.append(f"{d / 'roster.json'}: entry {i}: bad role {e.get('role')!r}")
            pid = e.get("player_id")
            if pid in known_players:
                problems.append(f"{d / 'roster.json'}: entry {i}: duplicate player {pid!r}")
            known_players.add(pid)
    except json.JSONDecodeError as exc:
        problems.append(f"{d / 'roster.json'}:{exc.lineno}: invalid JSON")

    length = meta.get("pitch_length_m", 105.0)
    width = meta.get("pitch_width_m", 68.0)
    last_fid = None
    frame_ids: set[int] = set()
    with open(d / "tracking.jsonl", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                problems.append(f"{d / 'tracking.jsonl'}:{lineno}: invalid JSON")
                continue
            fid = obj.get("frame_id")
            if not isinstance(fid, int):
                problems.append(f"{d / 'tracking.jsonl'}:{lineno}: missing frame_id")
                continue
            if last_fid is not None and fid <= last_fid:
                problems.append(
                    f"{d / 'tracking.jsonl'}:{lineno}: frame_id {fid} not increasing"
                )
            last_fid = fid
            frame_ids.add(fid)
            for p in obj.get("players", ()):
                pid = p.get("pid")
                if known_players and pid not in known_players:
                    problems.append(
                        f"{d / 'tracking.jsonl'}:{lineno}: unknown player {pid!r}"
                    )
                x, y = p.get("x"), p.get("y")
                if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
                    problems.append(f"{d / 'tracking.jsonl'}:{lineno}: bad coordinates")
                elif not (-5.0 <= x <= length + 5.0 and -5.0 <= y <= width + 5.0):
                    problems.append(
                        f"{d / 'tracking.jsonl'}:{lineno}: player {pid!r} out of bounds"
                    )

    try:
        events = json.loads((d / "events.json").read_text())
        for i, e in enumerate(events):
            where = f"{d / 'events.json'}: event {i} ({e.get('event_id', '?')})"
            for key in ("event_id", "type", "team_id", "player_id", "outcome"):
                if key not in e:
                    problems.append(f"{where}: missing {key!r}")
            try:
                EventType(e.get("type"))
            except ValueError:
                problems.append(f"{where}: unknown type {e.get('type')!r}")
            try:
                EventOutcome(e.get("outcome"))
            except ValueError:
                problems.append(f"{where}: unknown outcome {e.get('outcome')!r}")
            if known_players and e.get("player_id") not in known_players:
                problems.append(f"{where}: unknown player {e.get('player_id')!r}")
            fid = e.get("frame_id")
            if fid is not None and frame_ids and fid not in frame_ids:
                problems.append(f"{where}: frame_id {fid} not in tracking")
            if (
                e.get("type") == "pass"
                and e.get("outcome") == "complete"
                and not e.get("receiver_id")
            ):
                problems.append(f"{where}: completed pass without receiver_id")
    except json.JSONDecodeError as exc:
        problems.append(f"{d / 'events.json'}:{exc.lineno}: invalid JSON")
    return problems


@main.command("validate")
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False))
def cmd_validate(input_dir: str):
    """Schema and invariant lint of match directories with line diagnostics."""
    root = Path(input_dir)
    dirs = _match_dirs(root) or ([root] if (root / "meta.json").exists() else [])
    problems: list[str] = []
    for d in dirs:
        problems.extend(_validate_match_dir(d))
    if not dirs:
        problems.append(f"{root}: no match directories found")
    for p in problems:
        click.echo(p)
    if not problems:
        click.echo(f"validated {len(dirs)} match dir(s): clean")
    sys.exit(0 if not problems else 1)


# ---------------------------------------------------------------------------
# generate


@main.command("generate")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=0)
@click.option("--lbps", type=int, default=5, help="planted line-breaking passes")
@click.option("--chains1", type=int, default=1, help="planted single-link chains")
@click.option("--chains2", type=int, default=1, help="planted double-link chains")
@click.option("--decoys", type=int, default=4)
@click.option("--passes", "n_passes", type=int, default=40, help="total pass volume")
@click.option("--noise", type=float, default=0.2)
@click.option("--full-match", is_flag=True, default=False, help="90 min at 29.97 Hz")
@click.option("--match-id", type=str, default="synthetic")
def cmd_generate(out_dir, seed, lbps, chains1, chains2, decoys, n_passes, noise, full_match, match_id):
    """Write a synthetic match fixture with its ground-truth ledger."""
    lbp_specs = tuple(
        testkit.PlantedLbpSpec(
            lines_to_cross=1 + (i % 3),
            bypass_count=2 + (i % 3),
            forward_margin_m=5.0 + 2.0 * (i % 4),
        )
        for i in range(lbps)
    )
    chain_specs = tuple(
        [testkit.PlantedChainSpec(kind=1, outcome="saved")] * chains1
        + [testkit.PlantedChainSpec(kind=2, outcome="goal")] * chains2
    )
    plan = testkit.SyntheticPlan(
        seed=seed,
        n_passes=n_passes,
        planted_lbp_specs=lbp_specs,
        planted_chain_specs=chain_specs,
        n_decoys=decoys,
        noise_sigma_m=noise,
        duration_s=5400.0 if full_match else None,
        match_id=match_id,
    )
    try:
        ledger = testkit.write_fixture(plan, out_dir)
    except LinebreakerError as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(
        f"wrote fixture to {out_dir}: {len(ledger.passes)} expected pass verdicts, "
        f"{len(ledger.chains)} chains"
    )
    sys.exit(0)


# ---------------------------------------------------------------------------
# selftest


@main.command("selftest")
def cmd_selftest():
    """Verify config defaults and run a tiny end-to-end closure check."""
    import tempfile

    failures: list[str] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
        if not ok:
            failures.append(name)

    cfg = load_config(None)
    check("default smoothing window", cfg.smoothing_window == DEFAULT_SMOOTHING_WINDOW)
    check("default bypass radius", cfg.detect.bypass_radius_m == DEFAULT_BYPASS_RADIUS_M)
    check("default forward margin", cfg.detect.min_forward_m == DEFAULT_MIN_FORWARD_M)
    check(
        "default open-play guard",
        cfg.detect.open_play_guard_events == OPEN_PLAY_GUARD_EVENTS,
    )
    check("default k candidates", cfg.detect.shape.k_candidates == (2, 3, 4))
    check("default goalkeeper exclusion", cfg.detect.shape.exclude_goalkeeper is True)
    check("default min spread", cfg.detect.shape.min_spread_m == 1.0)
    check("default conclusion lookahead", cfg.chain.conclusion_lookahead_events == 1)

    plan = testkit.SyntheticPlan(
        seed=7,
        n_passes=14,
        planted_lbp_specs=(testkit.PlantedLbpSpec(2, 3),),
        planted_chain_specs=(testkit.PlantedChainSpec(kind=2, outcome="goal"),),
        n_decoys=2,
    )
    with tempfile.TemporaryDirectory() as tmp:
        testkit.write_fixture(plan, tmp)
        records, chains = process_match(tmp, cfg)
        ledger = testkit.GroundTruthLedger.from_json(
            (Path(tmp) / "ledger.json").read_text()
        )
        detected = {r.pass_event_id for r in records if r.is_lbp}
        check(
            "end-to-end ledger closure",
            detected == set(ledger.expected_lbp_ids()),
            f"detected {len(detected)} vs expected {len(ledger.expected_lbp_ids())}",
        )
        check(
            "chain closure",
            {tuple(c.lbp_event_ids) for c in chains}
            == {tuple(c.lbp_event_ids) for c in ledger.chains},
        )
    sys.exit(0 if not failures else 1)


if __name__ == "__main__":
    main()

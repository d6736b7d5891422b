"""StatsBomb-format ingestion: events, 360 freeze frames, and lineups.

Parses the open-data v2 JSON layout, joins passes with their freeze
frames, normalizes coordinates into the engine's pitch frame, and
persists the result as one JSON-Lines file of snapshots per match plus
a manifest of counts. Out-of-range coordinates are clamped to the pitch
and counted rather than rejected; passes without a matching frame are
excluded from detection but reported so downstream denominators stay
honest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from p3engine.errors import ParseError, RosterError, StageError
from p3engine.geometry import Polygon
from p3engine.jsonio import read_json, read_jsonl, write_json, write_jsonl
from p3engine.pitch import clamp_to_pitch, in_pitch

SCHEMA_VERSION = 1

Point = tuple[float, float]

# Event kinds the engine distinguishes; everything else is retained as
# "other" because minutes computation needs the full timeline.
PASS = "pass"
SUBSTITUTION = "substitution"
OTHER = "other"

BODY_PARTS = {"Right Foot": "right_foot", "Left Foot": "left_foot", "Head": "head"}
FOOT_PARTS = ("right_foot", "left_foot")

OUTCOMES = {
    "Incomplete": "incomplete",
    "Out": "out",
    "Pass Offside": "offside",
    "Unknown": "unknown",
}

SET_PIECES = {"Throw-in", "Corner", "Free Kick", "Kick Off", "Goal Kick"}


@dataclass(frozen=True)
class PassDetail:
    body_part: str  # right_foot | left_foot | head | other
    end_location: Point | None
    outcome: str  # complete | incomplete | out | offside | unknown
    set_piece: bool


@dataclass(frozen=True)
class SubDetail:
    replacement_id: str


@dataclass(frozen=True)
class Event:
    event_id: str
    match_id: str
    minute: int
    second: int
    period: int
    team_id: str
    player_id: str
    event_kind: str  # pass | substitution | other
    location: Point | None
    under_pressure: bool
    pass_detail: PassDetail | None = None
    sub_detail: SubDetail | None = None


@dataclass(frozen=True)
class FramePlayer:
    location: Point
    teammate: bool
    actor: bool
    keeper: bool


@dataclass(frozen=True)
class Frame360:
    event_id: str
    visible_area: Polygon | None
    players: tuple[FramePlayer, ...]


@dataclass(frozen=True)
class PassSnapshot:
    """A pass event joined with its freeze frame, attacking toward +x."""

    event: Event
    frame: Frame360
    attack_sign: int = 1


@dataclass(frozen=True)
class RosterPlayer:
    player_id: str
    name: str
    team_id: str
    position_name: str
    birth_date: date | None


@dataclass(frozen=True)
class Substitution:
    minute: int
    off_player: str
    on_player: str


@dataclass
class Roster:
    match_id: str
    players: dict[str, RosterPlayer]
    starting: set[str]
    substitutions: list[Substitution] = field(default_factory=list)
    team_ids: tuple[str, ...] = ()


@dataclass
class ParseStats:
    records: int = 0
    skipped: int = 0
    skipped_reasons: list[str] = field(default_factory=list)
    clamped: int = 0

    def skip(self, index: int, reason: str) -> None:
        self.skipped += 1
        self.skipped_reasons.append(f"record {index}: {reason}")


@dataclass
class JoinStats:
    passes: int = 0
    snapshots: int = 0
    unmatched: int = 0
    no_opponents: int = 0
    duplicate_frames: int = 0


def _load_array(raw: bytes) -> list:
    try:
        data = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError("input is not UTF-8", exc.start) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(data, list):
        raise ParseError("expected a top-level JSON array")
    return data


def _as_point(value, stats: ParseStats) -> Point:
    x, y = float(value[0]), float(value[1])
    cx, cy = clamp_to_pitch(x, y)
    if (cx, cy) != (x, y):
        stats.clamped += 1
    return cx, cy


def _name(obj) -> str:
    return obj.get("name", "") if isinstance(obj, dict) else ""


def _ident(obj) -> str:
    if isinstance(obj, dict) and "id" in obj:
        return str(obj["id"])
    return ""


def parse_events(raw: bytes, match_id: str = "") -> tuple[list[Event], ParseStats]:
    """Parse a StatsBomb events file.

    Unknown event kinds map to "other" and are retained (minutes
    computation walks the full timeline). A pass missing its location or
    pass object is a record-level error: it is skipped and counted, not
    fatal. Order is preserved.
    """
    stats = ParseStats()
    events: list[Event] = []
    for i, rec in enumerate(_load_array(raw)):
        stats.records += 1
        if not isinstance(rec, dict) or "id" not in rec:
            stats.skip(i, "missing event id")
            continue
        kind_name = _name(rec.get("type"))
        kind = {"Pass": PASS, "Substitution": SUBSTITUTION}.get(kind_name, OTHER)
        location = rec.get("location")
        pass_detail = None
        sub_detail = None
        if kind == PASS:
            raw_pass = rec.get("pass")
            if not isinstance(raw_pass, dict):
                stats.skip(i, "pass without pass object")
                continue
            if location is None:
                stats.skip(i, "pass without location")
                continue
            if not rec.get("player") or not rec.get("team"):
                stats.skip(i, "pass without player/team")
                continue
            end_location = raw_pass.get("end_location")
            # StatsBomb convention: an absent outcome means the pass
            # was completed.
            outcome_name = _name(raw_pass.get("outcome"))
            outcome = "complete" if not outcome_name else OUTCOMES.get(outcome_name, "unknown")
            pass_detail = PassDetail(
                body_part=BODY_PARTS.get(_name(raw_pass.get("body_part")), "other"),
                end_location=_as_point(end_location, stats) if end_location else None,
                outcome=outcome,
                set_piece=_name(raw_pass.get("type")) in SET_PIECES,
            )
        elif kind == SUBSTITUTION:
            replacement = _ident(rec.get("substitution", {}).get("replacement"))
            if replacement:
                sub_detail = SubDetail(replacement_id=replacement)
        events.append(
            Event(
                event_id=str(rec["id"]),
                match_id=match_id,
                minute=int(rec.get("minute", 0)),
                second=int(rec.get("second", 0)),
                period=int(rec.get("period", 1)),
                team_id=_ident(rec.get("team")),
                player_id=_ident(rec.get("player")),
                event_kind=kind,
                location=_as_point(location, stats) if location is not None else None,
                under_pressure=bool(rec.get("under_pressure", False)),
                pass_detail=pass_detail,
                sub_detail=sub_detail,
            )
        )
    return events, stats


def _visible_area(raw, stats: ParseStats) -> Polygon | None:
    if not raw:
        return None
    # Open data serializes the polygon as a flat coordinate list; accept
    # nested pairs as well.
    if isinstance(raw[0], (int, float)):
        pairs = [(raw[i], raw[i + 1]) for i in range(0, len(raw) - 1, 2)]
    else:
        pairs = [(p[0], p[1]) for p in raw]
    try:
        return Polygon.from_raw(pairs)
    except (ValueError, TypeError, IndexError):
        stats.skipped_reasons.append("degenerate visible_area dropped")
        return None


def parse_frames(raw: bytes) -> tuple[list[Frame360], ParseStats]:
    """Parse a StatsBomb 360 file into freeze frames keyed by event id."""
    stats = ParseStats()
    frames: list[Frame360] = []
    for i, rec in enumerate(_load_array(raw)):
        stats.records += 1
        if not isinstance(rec, dict) or "event_uuid" not in rec:
            stats.skip(i, "missing event_uuid")
            continue
        raw_players = rec.get("freeze_frame")
        if not isinstance(raw_players, list):
            stats.skip(i, "missing freeze_frame")
            continue
        players: list[FramePlayer] = []
        actor_count = 0
        ok = True
        for p in raw_players:
            loc = p.get("location")
            if not loc:
                ok = False
                break
            teammate = bool(p.get("teammate", False))
            actor = bool(p.get("actor", False))
            if actor and not teammate:
                ok = False
                break
            actor_count += actor
            players.append(
                FramePlayer(
                    location=_as_point(loc, stats),
                    teammate=teammate,
                    actor=actor,
                    keeper=bool(p.get("keeper", False)),
                )
            )
        if not ok or actor_count > 1:
            stats.skip(i, "inconsistent freeze_frame flags")
            continue
        frames.append(
            Frame360(
                event_id=str(rec["event_uuid"]),
                visible_area=_visible_area(rec.get("visible_area"), stats),
                players=tuple(players),
            )
        )
    return frames, stats


def parse_lineups(raw: bytes, match_id: str = "") -> Roster:
    """Parse a StatsBomb lineups file into a Roster (without subs;
    substitution records live in the events and are attached by
    attach_substitutions)."""
    data = _load_array(raw)
    if len(data) < 2:
        raise RosterError("roster incomplete: expected two teams")
    players: dict[str, RosterPlayer] = {}
    starting: set[str] = set()
    team_ids: list[str] = []
    for team in data:
        team_id = str(team.get("team_id", ""))
        lineup = team.get("lineup")
        if not team_id or not lineup:
            raise RosterError("roster incomplete: empty team list")
        team_ids.append(team_id)
        for p in lineup:
            pid = str(p.get("player_id", ""))
            if not pid:
                continue
            positions = p.get("positions") or []
            position_name = positions[0].get("position", "") if positions else ""
            birth = p.get("birth_date")
            try:
                birth_date = date.fromisoformat(birth) if birth else None
            except ValueError:
                birth_date = None
            players[pid] = RosterPlayer(
                player_id=pid,
                name=p.get("player_name", ""),
                team_id=team_id,
                position_name=position_name,
                birth_date=birth_date,
            )
            if any(pos.get("from") == "00:00" and pos.get("from_period", 1) == 1 for pos in positions):
                starting.add(pid)
    return Roster(match_id=match_id, players=players, starting=starting, team_ids=tuple(team_ids))


def attach_substitutions(roster: Roster, events: Sequence[Event]) -> list[str]:
    """Fill roster substitution records from substitution events.

    Returns warnings for records referencing unknown players (skipped).
    A substituted-on player present in the starting XI is also a warning
    because it breaks the roster invariant.
    """
    warnings: list[str] = []
    subs: list[Substitution] = []
    for ev in events:
        if ev.event_kind != SUBSTITUTION or ev.sub_detail is None:
            continue
        off_id, on_id = ev.player_id, ev.sub_detail.replacement_id
        if off_id not in roster.players or on_id not in roster.players:
            warnings.append(f"substitution references unknown player ({off_id} -> {on_id})")
            continue
        if on_id in roster.starting:
            warnings.append(f"substituted-on player {on_id} already in starting XI")
            continue
        subs.append(Substitution(minute=ev.minute, off_player=off_id, on_player=on_id))
    roster.substitutions = subs
    return warnings


def normalize_snapshot(snapshot: PassSnapshot) -> PassSnapshot:
    """Clamp every coordinate to pitch bounds and fix attack_sign = +1.

    StatsBomb data is already oriented with the acting team attacking
    left-to-right, so normalization is idempotent clamping.
    """
    event = snapshot.event
    if event.location is not None and not in_pitch(*event.location):
        event = replace(event, location=clamp_to_pitch(*event.location))
    detail = event.pass_detail
    if detail is not None and detail.end_location is not None and not in_pitch(*detail.end_location):
        event = replace(event, pass_detail=replace(detail, end_location=clamp_to_pitch(*detail.end_location)))
    players = tuple(
        p if in_pitch(*p.location) else replace(p, location=clamp_to_pitch(*p.location))
        for p in snapshot.frame.players
    )
    frame = snapshot.frame if players == snapshot.frame.players else replace(snapshot.frame, players=players)
    return PassSnapshot(event=event, frame=frame, attack_sign=1)


def join_pass_frames(
    events: Sequence[Event], frames: Sequence[Frame360]
) -> tuple[list[PassSnapshot], JoinStats]:
    """Join pass events with freeze frames by event id.

    One snapshot per pass that has a frame containing at least one
    opponent. Duplicate frames for an event keep the first occurrence.
    Mismatches are reported statistics, never failures, and the counts
    satisfy snapshots + unmatched + no_opponents = passes.
    """
    stats = JoinStats()
    by_event: dict[str, Frame360] = {}
    for frame in frames:
        if frame.event_id in by_event:
            stats.duplicate_frames += 1
            continue
        by_event[frame.event_id] = frame
    snapshots: list[PassSnapshot] = []
    for ev in events:
        if ev.event_kind != PASS:
            continue
        stats.passes += 1
        frame = by_event.get(ev.event_id)
        if frame is None:
            stats.unmatched += 1
            continue
        if not any(not p.teammate for p in frame.players):
            stats.no_opponents += 1
            continue
        snapshots.append(normalize_snapshot(PassSnapshot(event=ev, frame=frame)))
    snapshots.sort(key=lambda s: (s.event.match_id, s.event.period, s.event.minute, s.event.second))
    stats.snapshots = len(snapshots)
    return snapshots, stats


# --- serialization ----------------------------------------------------------

def _point_json(p: Point | None):
    return None if p is None else [p[0], p[1]]


def _point_from(v) -> Point | None:
    return None if v is None else (float(v[0]), float(v[1]))


def snapshot_to_json(s: PassSnapshot) -> dict:
    ev = s.event
    d: dict = {
        "event_id": ev.event_id,
        "match_id": ev.match_id,
        "minute": ev.minute,
        "second": ev.second,
        "period": ev.period,
        "team_id": ev.team_id,
        "player_id": ev.player_id,
        "event_kind": ev.event_kind,
        "location": _point_json(ev.location),
        "under_pressure": ev.under_pressure,
    }
    if ev.pass_detail is not None:
        pd = ev.pass_detail
        d["pass"] = {
            "body_part": pd.body_part,
            "end_location": _point_json(pd.end_location),
            "outcome": pd.outcome,
            "set_piece": pd.set_piece,
        }
    frame = {
        "event_id": s.frame.event_id,
        "visible_area": None
        if s.frame.visible_area is None
        else [[x, y] for x, y in s.frame.visible_area.vertices],
        "players": [
            {
                "location": _point_json(p.location),
                "teammate": p.teammate,
                "actor": p.actor,
                "keeper": p.keeper,
            }
            for p in s.frame.players
        ],
    }
    return {"event": d, "frame": frame, "attack_sign": s.attack_sign}


def snapshot_from_json(obj: dict) -> PassSnapshot:
    ev = obj["event"]
    pd = ev.get("pass")
    detail = (
        PassDetail(
            body_part=pd["body_part"],
            end_location=_point_from(pd.get("end_location")),
            outcome=pd["outcome"],
            set_piece=pd["set_piece"],
        )
        if pd
        else None
    )
    event = Event(
        event_id=ev["event_id"],
        match_id=ev["match_id"],
        minute=ev["minute"],
        second=ev["second"],
        period=ev["period"],
        team_id=ev["team_id"],
        player_id=ev["player_id"],
        event_kind=ev["event_kind"],
        location=_point_from(ev.get("location")),
        under_pressure=ev["under_pressure"],
        pass_detail=detail,
    )
    fr = obj["frame"]
    visible = fr.get("visible_area")
    frame = Frame360(
        event_id=fr["event_id"],
        visible_area=Polygon(tuple((float(x), float(y)) for x, y in visible)) if visible else None,
        players=tuple(
            FramePlayer(
                location=_point_from(p["location"]),
                teammate=p["teammate"],
                actor=p["actor"],
                keeper=p["keeper"],
            )
            for p in fr["players"]
        ),
    )
    return PassSnapshot(event=event, frame=frame, attack_sign=obj.get("attack_sign", 1))


def roster_to_json(r: Roster) -> dict:
    return {
        "match_id": r.match_id,
        "team_ids": list(r.team_ids),
        "players": {
            pid: {
                "name": p.name,
                "team_id": p.team_id,
                "position_name": p.position_name,
                "birth_date": p.birth_date.isoformat() if p.birth_date else None,
            }
            for pid, p in sorted(r.players.items())
        },
        "starting": sorted(r.starting),
        "substitutions": [
            {"minute": s.minute, "off_player": s.off_player, "on_player": s.on_player}
            for s in r.substitutions
        ],
    }


def roster_from_json(obj: dict) -> Roster:
    players = {
        pid: RosterPlayer(
            player_id=pid,
            name=p["name"],
            team_id=p["team_id"],
            position_name=p["position_name"],
            birth_date=date.fromisoformat(p["birth_date"]) if p.get("birth_date") else None,
        )
        for pid, p in obj["players"].items()
    }
    return Roster(
        match_id=obj["match_id"],
        players=players,
        starting=set(obj["starting"]),
        substitutions=[
            Substitution(minute=s["minute"], off_player=s["off_player"], on_player=s["on_player"])
            for s in obj["substitutions"]
        ],
        team_ids=tuple(obj.get("team_ids", [])),
    )


# --- store layout -----------------------------------------------------------

@dataclass
class MatchRecord:
    """Per-match ingestion result ready to persist."""

    match_id: str
    snapshots: list[PassSnapshot]
    roster: Roster | None
    teams: tuple[str, ...]
    end_minute: int
    counts: dict[str, int]


def write_store(store_dir: Path, matches: Sequence[MatchRecord], extra: dict | None = None) -> None:
    """Persist normalized snapshots plus manifest/rosters/matches files.

    One `<match_id>.snapshots.jsonl` per match; the manifest carries the
    schema version and per-match counts. The manifest is written last,
    once, after all matches are on disk.
    """
    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"schema_version": SCHEMA_VERSION, "matches": {}}
    rosters: dict[str, dict] = {}
    match_meta: dict[str, dict] = {}
    for rec in sorted(matches, key=lambda m: m.match_id):
        write_jsonl(
            store_dir / f"{rec.match_id}.snapshots.jsonl",
            (snapshot_to_json(s) for s in rec.snapshots),
        )
        manifest["matches"][rec.match_id] = dict(rec.counts)
        if rec.roster is not None:
            rosters[rec.match_id] = roster_to_json(rec.roster)
        match_meta[rec.match_id] = {"teams": list(rec.teams), "end_minute": rec.end_minute}
    if extra:
        manifest.update(extra)
    write_json(store_dir / "rosters.json", rosters)
    write_json(store_dir / "matches.json", match_meta)
    write_json(store_dir / "manifest.json", manifest)


def store_match_ids(store_dir: Path) -> list[str]:
    store_dir = Path(store_dir)
    manifest_path = store_dir / "manifest.json"
    if not manifest_path.exists():
        raise StageError(f"no ingest store at {store_dir}: run `p3 ingest` or `p3 synth` first")
    return sorted(read_json(manifest_path)["matches"].keys())


def iter_store_snapshots(store_dir: Path) -> Iterator[PassSnapshot]:
    """Yield snapshots across all matches in deterministic match order."""
    store_dir = Path(store_dir)
    for match_id in store_match_ids(store_dir):
        path = store_dir / f"{match_id}.snapshots.jsonl"
        if not path.exists():
            continue
        for obj in read_jsonl(path):
            yield snapshot_from_json(obj)


def read_rosters(store_dir: Path) -> dict[str, Roster]:
    path = Path(store_dir) / "rosters.json"
    if not path.exists():
        return {}
    return {mid: roster_from_json(obj) for mid, obj in read_json(path).items()}


def read_match_meta(store_dir: Path) -> dict[str, dict]:
    path = Path(store_dir) / "matches.json"
    if not path.exists():
        return {}
    return read_json(path)


def ingest_match(
    match_id: str,
    events_raw: bytes,
    frames_raw: bytes,
    lineups_raw: bytes | None = None,
) -> MatchRecord:
    """Run the full per-match ingestion: parse, join, normalize, count."""
    events, ev_stats = parse_events(events_raw, match_id=match_id)
    frames, fr_stats = parse_frames(frames_raw)
    snapshots, join_stats = join_pass_frames(events, frames)
    roster = None
    if lineups_raw is not None:
        roster = parse_lineups(lineups_raw, match_id=match_id)
        attach_substitutions(roster, events)
    teams = roster.team_ids if roster else tuple(sorted({e.team_id for e in events if e.team_id}))
    end_minute = max((e.minute for e in events), default=0)
    return MatchRecord(
        match_id=match_id,
        snapshots=snapshots,
        roster=roster,
        teams=teams,
        end_minute=end_minute,
        counts={
            "passes": join_stats.passes,
            "snapshots": join_stats.snapshots,
            "unmatched": join_stats.unmatched,
            "clamped": ev_stats.clamped + fr_stats.clamped,
        },
    )


def ingest_tree(data_dir: Path, store_dir: Path) -> dict:
    """Ingest a StatsBomb open-data layout: events/, three-sixty/, lineups/.

    Only matches present in both events/ and three-sixty/ are ingested.
    Returns the manifest dict that was written.
    """
    data_dir = Path(data_dir)
    events_dir = data_dir / "events"
    frames_dir = data_dir / "three-sixty"
    lineups_dir = data_dir / "lineups"
    if not events_dir.is_dir():
        raise StageError(f"missing events directory: {events_dir}")
    if not frames_dir.is_dir():
        raise StageError(f"missing three-sixty directory: {frames_dir}")
    records = []
    for events_path in sorted(events_dir.glob("*.json")):
        match_id = events_path.stem
        frames_path = frames_dir / events_path.name
        if not frames_path.exists():
            continue
        lineups_path = lineups_dir / events_path.name
        records.append(
            ingest_match(
                match_id,
                events_path.read_bytes(),
                frames_path.read_bytes(),
                lineups_path.read_bytes() if lineups_path.exists() else None,
            )
        )
    if not records:
        raise StageError(f"no ingestable matches under {data_dir}")
    write_store(store_dir, records)
    return read_json(Path(store_dir) / "manifest.json")

"""P3 moment detection.

A snapshot qualifies as a Potential Penetrative Pass moment when the
pass is played with the foot in open play from the valid zone, at least
`min_opponents_for_hull` non-goalkeeper opponents sit ahead of the ball
forming a non-degenerate convex hull, and at least one teammate is
positioned inside that hull to receive. The positive label is assigned
when the pass completes into the hull frozen at the pass moment.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from p3engine.errors import StageError
from p3engine.geometry import (
    BOUNDARY,
    INSIDE,
    Polygon,
    convex_hull,
    point_in_polygon,
    polygon_area,
)
from p3engine.ingest import (
    FOOT_PARTS,
    FramePlayer,
    PassDetail,
    PassSnapshot,
    iter_store_snapshots,
)
from p3engine.jsonio import read_json, read_jsonl, write_json, write_jsonl
from p3engine.pitch import ZONE_HI, ZONE_LO

Point = tuple[float, float]

PENETRATIVE = "penetrative"
NON_PENETRATIVE = "non_penetrative"

# Rejection reasons, in rule order; detect_p3 reports the first failure.
REASON_BODY_PART = "body part"
REASON_SET_PIECE = "set piece"
REASON_OUTSIDE_ZONE = "outside zone"
REASON_INSUFFICIENT_OPPONENTS = "insufficient opponents"
REASON_DEGENERATE_HULL = "degenerate hull"
REASON_NO_RECEIVER = "no receiver inside hull"

ALL_REASONS = (
    REASON_BODY_PART,
    REASON_SET_PIECE,
    REASON_OUTSIDE_ZONE,
    REASON_INSUFFICIENT_OPPONENTS,
    REASON_DEGENERATE_HULL,
    REASON_NO_RECEIVER,
)


@dataclass(frozen=True)
class DetectConfig:
    min_opponents_for_hull: int = 3
    boundary_counts_inside: bool = True
    zone_lo: float = ZONE_LO
    zone_hi: float = ZONE_HI
    exclude_set_pieces: bool = True

    def __post_init__(self):
        if not (0.0 <= self.zone_lo < self.zone_hi <= 120.0):
            raise ValueError("zone bounds must satisfy 0 <= lo < hi <= 120")

    def to_json(self) -> dict:
        return {
            "min_opponents_for_hull": self.min_opponents_for_hull,
            "boundary_counts_inside": self.boundary_counts_inside,
            "zone_lo": self.zone_lo,
            "zone_hi": self.zone_hi,
            "exclude_set_pieces": self.exclude_set_pieces,
        }

    @staticmethod
    def from_json(obj: dict) -> "DetectConfig":
        return DetectConfig(**obj)


@dataclass(frozen=True)
class Rejection:
    """Why a snapshot is not a P3 moment. A value, not an error."""

    reason: str


@dataclass(frozen=True)
class LabelBasis:
    outcome: str
    end_location: Point | None
    end_in_hull: bool


@dataclass(frozen=True)
class P3Moment:
    moment_id: str
    match_id: str
    event_id: str
    team_id: str
    player_id: str
    period: int
    minute: int
    second: int
    origin: Point
    under_pressure: bool
    hull: Polygon
    # Number of opponents the hull is built over: ahead of the ball,
    # goalkeeper excluded (vertices plus any interior opponents).
    opponents_in_hull_count: int
    receivers_inside: tuple[Point, ...]
    visible_area: Polygon | None
    all_players: tuple[FramePlayer, ...]
    label: str
    label_basis: LabelBasis

    @property
    def hull_area(self) -> float:
        return polygon_area(self.hull)


def moment_id_for(match_id: str, event_id: str) -> str:
    """Stable across runs so explorer bookmarks survive re-detection."""
    return hashlib.sha256(f"{match_id}|{event_id}".encode("utf-8")).hexdigest()[:16]


def label_penetrative(hull: Polygon, pass_detail: PassDetail) -> tuple[str, LabelBasis]:
    """Assign the penetrative label: completed into the hull.

    The hull is the one frozen at the pass moment. A missing end
    location can never be verified inside the hull, so it labels
    non-penetrative.
    """
    end = pass_detail.end_location
    end_in_hull = end is not None and point_in_polygon(end, hull) in (INSIDE, BOUNDARY)
    label = PENETRATIVE if (pass_detail.outcome == "complete" and end_in_hull) else NON_PENETRATIVE
    return label, LabelBasis(outcome=pass_detail.outcome, end_location=end, end_in_hull=end_in_hull)


def detect_p3(snapshot: PassSnapshot, cfg: DetectConfig = DetectConfig()) -> P3Moment | Rejection:
    """Apply the P3 rules to one normalized snapshot.

    Rules run in a fixed order and the rejection names the first that
    fails: foot pass, open play, valid zone, enough opponents ahead,
    non-degenerate hull, receiver inside.
    """
    event = snapshot.event
    detail = event.pass_detail
    if event.event_kind != "pass" or detail is None or event.location is None:
        raise ValueError("detect_p3 requires a pass snapshot with location")

    if detail.body_part not in FOOT_PARTS:
        return Rejection(REASON_BODY_PART)
    if cfg.exclude_set_pieces and detail.set_piece:
        return Rejection(REASON_SET_PIECE)
    origin = event.location
    if not (cfg.zone_lo <= origin[0] <= cfg.zone_hi):
        return Rejection(REASON_OUTSIDE_ZONE)

    ahead = [
        p
        for p in snapshot.frame.players
        if not p.teammate and not p.keeper and p.location[0] > origin[0]
    ]
    if len(ahead) < cfg.min_opponents_for_hull:
        return Rejection(REASON_INSUFFICIENT_OPPONENTS)
    hull = convex_hull([p.location for p in ahead])
    if hull is None:
        return Rejection(REASON_DEGENERATE_HULL)

    inside_kinds = (INSIDE, BOUNDARY) if cfg.boundary_counts_inside else (INSIDE,)
    receivers = tuple(
        p.location
        for p in snapshot.frame.players
        if p.teammate and not p.actor and point_in_polygon(p.location, hull) in inside_kinds
    )
    if not receivers:
        return Rejection(REASON_NO_RECEIVER)

    label, basis = label_penetrative(hull, detail)
    return P3Moment(
        moment_id=moment_id_for(event.match_id, event.event_id),
        match_id=event.match_id,
        event_id=event.event_id,
        team_id=event.team_id,
        player_id=event.player_id,
        period=event.period,
        minute=event.minute,
        second=event.second,
        origin=origin,
        under_pressure=event.under_pressure,
        hull=hull,
        opponents_in_hull_count=len(ahead),
        receivers_inside=receivers,
        visible_area=snapshot.frame.visible_area,
        all_players=snapshot.frame.players,
        label=label,
        label_basis=basis,
    )


@dataclass
class DetectReport:
    snapshots: int = 0
    moments: int = 0
    positives: int = 0
    rejections: dict[str, int] = field(default_factory=dict)
    config: DetectConfig = field(default_factory=DetectConfig)

    @property
    def positive_share(self) -> float:
        return self.positives / self.moments if self.moments else 0.0

    def to_json(self) -> dict:
        return {
            "snapshots": self.snapshots,
            "moments": self.moments,
            "positives": self.positives,
            "positive_share": self.positive_share,
            "rejections": {k: self.rejections.get(k, 0) for k in ALL_REASONS},
            "config": self.config.to_json(),
        }


def detect_many(
    snapshots: Iterable[PassSnapshot], cfg: DetectConfig = DetectConfig()
) -> tuple[list[P3Moment], DetectReport]:
    """Run detection over snapshots, counting rejections by reason."""
    report = DetectReport(config=cfg)
    moments: list[P3Moment] = []
    for snap in snapshots:
        report.snapshots += 1
        result = detect_p3(snap, cfg)
        if isinstance(result, Rejection):
            report.rejections[result.reason] = report.rejections.get(result.reason, 0) + 1
            continue
        moments.append(result)
    moments.sort(key=lambda m: (m.match_id, m.period, m.minute, m.second, m.event_id))
    report.moments = len(moments)
    report.positives = sum(1 for m in moments if m.label == PENETRATIVE)
    return moments, report


def scan_corpus(
    store_dir: Path, cfg: DetectConfig = DetectConfig()
) -> tuple[list[P3Moment], DetectReport]:
    """Detect over every snapshot in an ingest store, in deterministic
    (match, period, clock) order."""
    store_dir = Path(store_dir)
    if not (store_dir / "manifest.json").exists():
        raise StageError(f"missing ingest store at {store_dir}: run `p3 ingest` or `p3 synth` first")
    return detect_many(iter_store_snapshots(store_dir), cfg)


# --- persistence ------------------------------------------------------------

def _poly_json(poly: Polygon | None):
    return None if poly is None else [[x, y] for x, y in poly.vertices]


def _poly_from(value) -> Polygon | None:
    if value is None:
        return None
    return Polygon(tuple((float(x), float(y)) for x, y in value))


def moment_to_json(m: P3Moment) -> dict:
    return {
        "moment_id": m.moment_id,
        "match_id": m.match_id,
        "event_id": m.event_id,
        "team_id": m.team_id,
        "player_id": m.player_id,
        "period": m.period,
        "minute": m.minute,
        "second": m.second,
        "origin": [m.origin[0], m.origin[1]],
        "under_pressure": m.under_pressure,
        "hull": _poly_json(m.hull),
        "opponents_in_hull_count": m.opponents_in_hull_count,
        "receivers_inside": [[x, y] for x, y in m.receivers_inside],
        "visible_area": _poly_json(m.visible_area),
        "all_players": [
            {
                "location": [p.location[0], p.location[1]],
                "teammate": p.teammate,
                "actor": p.actor,
                "keeper": p.keeper,
            }
            for p in m.all_players
        ],
        "label": m.label,
        "label_basis": {
            "outcome": m.label_basis.outcome,
            "end_location": None
            if m.label_basis.end_location is None
            else [m.label_basis.end_location[0], m.label_basis.end_location[1]],
            "end_in_hull": m.label_basis.end_in_hull,
        },
    }


def moment_from_json(obj: dict) -> P3Moment:
    basis = obj["label_basis"]
    end = basis.get("end_location")
    return P3Moment(
        moment_id=obj["moment_id"],
        match_id=obj["match_id"],
        event_id=obj["event_id"],
        team_id=obj["team_id"],
        player_id=obj["player_id"],
        period=obj["period"],
        minute=obj["minute"],
        second=obj["second"],
        origin=(float(obj["origin"][0]), float(obj["origin"][1])),
        under_pressure=obj["under_pressure"],
        hull=_poly_from(obj["hull"]),
        opponents_in_hull_count=obj["opponents_in_hull_count"],
        receivers_inside=tuple((float(x), float(y)) for x, y in obj["receivers_inside"]),
        visible_area=_poly_from(obj.get("visible_area")),
        all_players=tuple(
            FramePlayer(
                location=(float(p["location"][0]), float(p["location"][1])),
                teammate=p["teammate"],
                actor=p["actor"],
                keeper=p["keeper"],
            )
            for p in obj["all_players"]
        ),
        label=obj["label"],
        label_basis=LabelBasis(
            outcome=basis["outcome"],
            end_location=None if end is None else (float(end[0]), float(end[1])),
            end_in_hull=basis["end_in_hull"],
        ),
    )


def write_moments(store_dir: Path, moments: Sequence[P3Moment], report: DetectReport) -> None:
    store_dir = Path(store_dir)
    write_jsonl(store_dir / "moments.jsonl", (moment_to_json(m) for m in moments))
    write_json(store_dir / "detect_report.json", report.to_json())


def read_moments(store_dir: Path) -> list[P3Moment]:
    path = Path(store_dir) / "moments.jsonl"
    if not path.exists():
        raise StageError(f"missing {path}: run `p3 detect` first")
    return [moment_from_json(obj) for obj in read_jsonl(path)]


def read_detect_config(store_dir: Path) -> DetectConfig:
    path = Path(store_dir) / "detect_report.json"
    if not path.exists():
        return DetectConfig()
    return DetectConfig.from_json(read_json(path)["config"])


def iter_moments(store_dir: Path) -> Iterator[P3Moment]:
    for obj in read_jsonl(Path(store_dir) / "moments.jsonl"):
        yield moment_from_json(obj)

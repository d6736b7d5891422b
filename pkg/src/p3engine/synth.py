"""Seeded synthetic corpus generator.

Fabricates PassSnapshots whose class signal is purely geometric:
positive moments have sparse, large hulls with the receiver deep
inside; negatives have small, crowded hulls. Pass origin, side, and
pressure are drawn independently of the label, so event-feature models
have nothing to learn while image models do. Every snapshot satisfies
all P3 rules by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from hashlib import sha256
from pathlib import Path
from typing import Sequence

import numpy as np

from p3engine.geometry import Polygon
from p3engine.ingest import (
    Event,
    Frame360,
    FramePlayer,
    MatchRecord,
    PassDetail,
    PassSnapshot,
    Roster,
    RosterPlayer,
    Substitution,
    normalize_snapshot,
    write_store,
)
from p3engine.jsonio import read_json

LEAGUE = tuple(f"TEAM{i:02d}" for i in range(8))

_POSITIONS = (
    "Goalkeeper",
    "Right Back",
    "Right Center Back",
    "Left Center Back",
    "Left Back",
    "Right Defensive Midfield",
    "Left Defensive Midfield",
    "Right Center Midfield",
    "Left Center Midfield",
    "Right Center Forward",
    "Left Center Forward",
    "Center Attacking Midfield",
    "Center Forward",
)


@dataclass(frozen=True)
class SynthConfig:
    n: int = 500
    seed: int = 7
    per_match: int = 100
    positive_share: float = 0.5


def _player_id(team: str, k: int) -> str:
    return f"{team}-p{k:02d}"


def _birth_date(player_id: str) -> date:
    # Stable per player across matches; spreads ages 18-31 at the 2020
    # reference date so the U23 group is populated.
    h = int(sha256(player_id.encode()).hexdigest()[:8], 16)
    return date(1989 + h % 14, 1 + h % 12, 1 + h % 28)


def _roster(match_id: str, home: str, away: str, sub_minute: int) -> Roster:
    players: dict[str, RosterPlayer] = {}
    starting: set[str] = set()
    for team in (home, away):
        for k in range(13):
            pid = _player_id(team, k)
            players[pid] = RosterPlayer(
                player_id=pid,
                name=f"Player {team}-{k}",
                team_id=team,
                position_name=_POSITIONS[k],
                birth_date=_birth_date(pid),
            )
            if k < 11:
                starting.add(pid)
    subs = [
        Substitution(
            minute=sub_minute,
            off_player=_player_id(home, 9),
            on_player=_player_id(home, 11),
        )
    ]
    return Roster(
        match_id=match_id,
        players=players,
        starting=starting,
        substitutions=subs,
        team_ids=(home, away),
    )


def _make_snapshot(i: int, match_id: str, attacking: str, rng: np.random.Generator,
                   positive_share: float, minute: int, second: int) -> PassSnapshot:
    positive = rng.random() < positive_share
    x0 = float(rng.uniform(42.0, 88.0))
    y0 = float(rng.uniform(12.0, 68.0))
    pressure = bool(rng.random() < 0.5)
    gap = float(rng.uniform(3.0, 5.0))

    if positive:
        depth = float(rng.uniform(14.0, 22.0))
        half_w = float(rng.uniform(14.0, 20.0))
        interior_opponents = 0
    else:
        depth = float(rng.uniform(4.0, 7.0))
        half_w = float(rng.uniform(4.0, 7.0))
        interior_opponents = 3
    half_w = min(half_w, y0 - 2.0, 78.0 - y0)

    x_near, x_far = x0 + gap, x0 + gap + depth
    corners = []
    for cx, cy in ((x_near, y0 - half_w), (x_near, y0 + half_w),
                   (x_far, y0 - half_w), (x_far, y0 + half_w)):
        jx = float(rng.uniform(-1.0, 1.0))
        jy = float(rng.uniform(-1.0, 1.0))
        corners.append((min(max(cx + jx, x0 + 1.0), 118.0), min(max(cy + jy, 1.0), 79.0)))

    cx_mid, cy_mid = x0 + gap + depth / 2.0, y0
    players: list[FramePlayer] = [
        FramePlayer(location=(x0, y0), teammate=True, actor=True, keeper=False),
        FramePlayer(
            location=(
                cx_mid + float(rng.uniform(-depth / 8.0, depth / 8.0)),
                cy_mid + float(rng.uniform(-half_w / 4.0, half_w / 4.0)),
            ),
            teammate=True,
            actor=False,
            keeper=False,
        ),
    ]
    receiver = players[1].location
    for _ in range(2):  # support teammates behind the ball
        players.append(
            FramePlayer(
                location=(
                    max(x0 - float(rng.uniform(5.0, 15.0)), 1.0),
                    min(max(y0 + float(rng.uniform(-25.0, 25.0)), 1.0), 79.0),
                ),
                teammate=True,
                actor=False,
                keeper=False,
            )
        )
    for loc in corners:
        players.append(FramePlayer(location=loc, teammate=False, actor=False, keeper=False))
    for _ in range(interior_opponents):
        players.append(
            FramePlayer(
                location=(
                    cx_mid + float(rng.uniform(-depth / 4.0, depth / 4.0)),
                    cy_mid + float(rng.uniform(-half_w / 2.0, half_w / 2.0)),
                ),
                teammate=False,
                actor=False,
                keeper=False,
            )
        )
    players.append(  # chasing opponent behind the ball
        FramePlayer(
            location=(max(x0 - float(rng.uniform(2.0, 10.0)), 1.0), y0),
            teammate=False,
            actor=False,
            keeper=False,
        )
    )
    players.append(  # opposing goalkeeper, ahead but never in the hull
        FramePlayer(
            location=(min(x_far + float(rng.uniform(8.0, 15.0)), 118.5), y0),
            teammate=False,
            actor=False,
            keeper=True,
        )
    )

    if positive:
        outcome, end = "complete", receiver
    elif rng.random() < 0.5:
        outcome, end = "incomplete", receiver
    else:  # completed, but played backwards out of the hull
        outcome, end = "complete", (max(x0 - float(rng.uniform(2.0, 8.0)), 1.0), y0)

    visible = Polygon.from_raw(
        [(max(x0 - 20.0, 0.0), 0.0), (120.0, 0.0), (120.0, 80.0), (max(x0 - 20.0, 0.0), 80.0)]
    )
    event = Event(
        event_id=f"ev{i:06d}",
        match_id=match_id,
        minute=minute,
        second=second,
        period=1 if minute < 45 else 2,
        team_id=attacking,
        player_id=_player_id(attacking, int(rng.integers(0, 11))),
        event_kind="pass",
        location=(x0, y0),
        under_pressure=pressure,
        pass_detail=PassDetail(
            body_part="right_foot" if rng.random() < 0.5 else "left_foot",
            end_location=end,
            outcome=outcome,
            set_piece=False,
        ),
    )
    frame = Frame360(event_id=event.event_id, visible_area=visible, players=tuple(players))
    return normalize_snapshot(PassSnapshot(event=event, frame=frame))


def generate_matches(cfg: SynthConfig) -> list[MatchRecord]:
    """Fabricate the corpus as per-match records ready to persist."""
    rng = np.random.default_rng(cfg.seed)
    records: list[MatchRecord] = []
    n_matches = (cfg.n + cfg.per_match - 1) // cfg.per_match
    i = 0
    for m in range(n_matches):
        match_id = f"SYN{m:04d}"
        home, away = LEAGUE[m % 8], LEAGUE[(m + 3) % 8]
        count = min(cfg.per_match, cfg.n - i)
        snapshots = []
        for k in range(count):
            minute = k * 90 // cfg.per_match
            attacking = home if k % 2 == 0 else away
            snapshots.append(
                _make_snapshot(i, match_id, attacking, rng, cfg.positive_share, minute, (i * 17) % 60)
            )
            i += 1
        snapshots.sort(key=lambda s: (s.event.match_id, s.event.period, s.event.minute, s.event.second))
        end_minute = 90 + m % 5
        records.append(
            MatchRecord(
                match_id=match_id,
                snapshots=snapshots,
                roster=_roster(match_id, home, away, sub_minute=60 + m % 15),
                teams=(home, away),
                end_minute=end_minute,
                counts={
                    "passes": count,
                    "snapshots": count,
                    "unmatched": 0,
                    "clamped": 0,
                },
            )
        )
    return records


def generate_store(cfg: SynthConfig, store_dir: Path) -> dict:
    """Write the synthetic corpus in the ingest store layout."""
    write_store(Path(store_dir), generate_matches(cfg), extra={"synth": {"n": cfg.n, "seed": cfg.seed}})
    return read_json(Path(store_dir) / "manifest.json")

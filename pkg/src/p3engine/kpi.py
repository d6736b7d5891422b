"""Player and team KPI aggregation.

The headline KPI is the P3 Percentage: penetrative passes divided by
potential penetrative passes, per player or team. Player tables apply
eligibility filters (minutes played, activity count) within positional
groups; team tables aggregate the attacking ratio and the conceded
opportunities per match.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Mapping, Sequence

from p3engine.detect import PENETRATIVE, P3Moment
from p3engine.ingest import Roster

GROUP_DEFENDER = "defender"
GROUP_MIDFIELDER = "midfielder"
GROUP_U23 = "u23"
GROUPS = (GROUP_DEFENDER, GROUP_MIDFIELDER, GROUP_U23)

COUNT_FILTER_MEDIAN = "group_median"
COUNT_FILTER_FIXED = "fixed"


@dataclass(frozen=True)
class KpiFilters:
    """Eligibility filters for player tables.

    count_mode "group_median" keeps players whose potential count
    reaches the median over the group's active players (ties pass);
    "fixed" keeps players with at least `fixed_count` penetrative
    passes, matching the published table captions.
    """

    min_minutes: int = 1140
    count_mode: str = COUNT_FILTER_MEDIAN
    fixed_count: int = 30
    reference_date: date = date(2020, 8, 1)
    u23_age_bound: int = 23

    def __post_init__(self):
        if self.min_minutes < 0:
            raise ValueError("min_minutes must be >= 0")
        if self.count_mode not in (COUNT_FILTER_MEDIAN, COUNT_FILTER_FIXED):
            raise ValueError(f"unknown count_mode {self.count_mode!r}")


@dataclass(frozen=True)
class PlayerKpiRow:
    player_id: str
    name: str
    team_id: str
    group: str
    minutes: int
    potential: int
    penetrative: int

    @property
    def p3_percentage(self) -> float:
        return self.penetrative / self.potential

    def to_json(self) -> dict:
        return {
            "player_id": self.player_id,
            "name": self.name,
            "team_id": self.team_id,
            "group": self.group,
            "minutes": self.minutes,
            "potential": self.potential,
            "penetrative": self.penetrative,
            "p3_percentage": self.p3_percentage,
        }


@dataclass(frozen=True)
class TeamKpiRow:
    team_id: str
    side: str  # attack | defense
    potential: int = 0
    penetrative: int = 0
    matches_played: int = 0
    opponent_potential_per_match: float = 0.0

    @property
    def p3_percentage(self) -> float:
        return self.penetrative / self.potential if self.potential else 0.0

    def to_json(self) -> dict:
        if self.side == "attack":
            return {
                "team_id": self.team_id,
                "side": self.side,
                "potential": self.potential,
                "penetrative": self.penetrative,
                "p3_percentage": self.p3_percentage,
            }
        return {
            "team_id": self.team_id,
            "side": self.side,
            "matches_played": self.matches_played,
            "opponent_potential_per_match": self.opponent_potential_per_match,
        }


def minutes_played(
    rosters: Mapping[str, Roster], match_end_minutes: Mapping[str, int]
) -> dict[str, int]:
    """Total minutes per player across matches.

    Starters run from 0 to their substitution-off minute or the match
    end; substitutes run from their sub-on minute to the match end. The
    match end is the last event minute of that match.
    """
    totals: dict[str, int] = {}
    for match_id in sorted(rosters):
        roster = rosters[match_id]
        end = int(match_end_minutes.get(match_id, 90))
        off_at = {s.off_player: s.minute for s in roster.substitutions}
        on_at = {s.on_player: s.minute for s in roster.substitutions}
        for pid in roster.players:
            if pid in roster.starting:
                played = min(off_at.get(pid, end), end)
            elif pid in on_at:
                played = max(end - on_at[pid], 0)
            else:
                continue
            totals[pid] = totals.get(pid, 0) + played
    return totals


def _age_at(born: date, ref: date) -> int:
    return ref.year - born.year - ((ref.month, ref.day) < (born.month, born.day))


def group_players(
    rosters: Mapping[str, Roster], group: str, filters: KpiFilters = KpiFilters()
) -> set[str]:
    """Players belonging to a positional/age group, across all matches.

    Defenders: any position containing "Back" (goalkeepers excluded);
    midfielders: containing "Midfield"; U23: strictly under the bound at
    the reference date. Players without a birth date are excluded from
    the U23 group only. A player may belong to several groups.
    """
    members: set[str] = set()
    for roster in rosters.values():
        for pid, player in roster.players.items():
            position = player.position_name or ""
            if group == GROUP_DEFENDER:
                if "Back" in position and "Goalkeeper" not in position:
                    members.add(pid)
            elif group == GROUP_MIDFIELDER:
                if "Midfield" in position:
                    members.add(pid)
            elif group == GROUP_U23:
                if player.birth_date is not None and _age_at(
                    player.birth_date, filters.reference_date
                ) < filters.u23_age_bound:
                    members.add(pid)
            else:
                raise ValueError(f"unknown group {group!r}")
    return members


def _player_counts(moments: Sequence[P3Moment]) -> dict[str, tuple[int, int]]:
    counts: dict[str, list[int]] = {}
    for m in moments:
        entry = counts.setdefault(m.player_id, [0, 0])
        entry[0] += 1
        entry[1] += m.label == PENETRATIVE
    return {pid: (c[0], c[1]) for pid, c in counts.items()}


def player_kpi(
    moments: Sequence[P3Moment],
    minutes: Mapping[str, int],
    rosters: Mapping[str, Roster],
    group: str,
    filters: KpiFilters = KpiFilters(),
) -> list[PlayerKpiRow]:
    """Per-player KPI rows for one group, sorted by P3 percentage
    descending (player id breaks ties deterministically)."""
    members = group_players(rosters, group, filters)
    counts = _player_counts(moments)
    active = [pid for pid in members if counts.get(pid, (0, 0))[0] >= 1]
    if not active:
        return []
    if filters.count_mode == COUNT_FILTER_MEDIAN:
        threshold = statistics.median(counts[pid][0] for pid in active)

        def passes_count(pid: str) -> bool:
            return counts[pid][0] >= threshold

    else:

        def passes_count(pid: str) -> bool:
            return counts[pid][1] >= filters.fixed_count

    info: dict[str, tuple[str, str]] = {}
    for match_id in sorted(rosters):
        for pid, player in rosters[match_id].players.items():
            info[pid] = (player.name, player.team_id)
    rows = [
        PlayerKpiRow(
            player_id=pid,
            name=info.get(pid, ("", ""))[0],
            team_id=info.get(pid, ("", ""))[1],
            group=group,
            minutes=minutes.get(pid, 0),
            potential=counts[pid][0],
            penetrative=counts[pid][1],
        )
        for pid in active
        if minutes.get(pid, 0) >= filters.min_minutes and passes_count(pid)
    ]
    rows.sort(key=lambda r: (-r.p3_percentage, r.player_id))
    return rows


def team_attack_kpi(moments: Sequence[P3Moment]) -> list[TeamKpiRow]:
    """Attacking P3 percentage per team, best first. Teams with no
    moments are omitted."""
    counts: dict[str, list[int]] = {}
    for m in moments:
        entry = counts.setdefault(m.team_id, [0, 0])
        entry[0] += 1
        entry[1] += m.label == PENETRATIVE
    rows = [
        TeamKpiRow(team_id=tid, side="attack", potential=c[0], penetrative=c[1])
        for tid, c in counts.items()
    ]
    rows.sort(key=lambda r: (-r.p3_percentage, r.team_id))
    return rows


def team_defense_kpi(
    moments: Sequence[P3Moment],
    match_teams: Mapping[str, Sequence[str]],
    matches_played: Mapping[str, int] | None = None,
) -> tuple[list[TeamKpiRow], list[str]]:
    """Conceded P3 opportunities per match, fewest first (better).

    A moment counts against the other team of its match. matches_played
    defaults to counts derived from match_teams; teams with zero matches
    are omitted with a warning.
    """
    if matches_played is None:
        derived: dict[str, int] = {}
        for teams in match_teams.values():
            for tid in teams:
                derived[tid] = derived.get(tid, 0) + 1
        matches_played = derived
    conceded: dict[str, int] = {tid: 0 for tid in matches_played}
    warnings: list[str] = []
    for m in moments:
        teams = match_teams.get(m.match_id)
        if not teams:
            warnings.append(f"moment {m.moment_id}: unknown match {m.match_id}")
            continue
        for tid in teams:
            if tid != m.team_id:
                conceded[tid] = conceded.get(tid, 0) + 1
    rows = []
    for tid in sorted(conceded):
        played = matches_played.get(tid, 0)
        if played < 1:
            warnings.append(f"team {tid}: zero matches played, omitted")
            continue
        rows.append(
            TeamKpiRow(
                team_id=tid,
                side="defense",
                matches_played=played,
                opponent_potential_per_match=conceded[tid] / played,
            )
        )
    rows.sort(key=lambda r: (r.opponent_potential_per_match, r.team_id))
    return rows, warnings


def write_kpi_csv(path: Path, rows: Sequence[PlayerKpiRow | TeamKpiRow]) -> None:
    """CSV mirror of a KPI table: same columns as the JSON, RFC-4180."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dicts = [r.to_json() for r in rows]
    columns = list(dicts[0].keys()) if dicts else []
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for d in dicts:
            writer.writerow([d[c] for c in columns])

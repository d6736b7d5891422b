"""Shared fixtures: hand-built snapshots and a small pipeline workspace."""

from __future__ import annotations

from pathlib import Path

import pytest

from p3engine.cli import run as cli_run
from p3engine.ingest import Event, Frame360, FramePlayer, PassDetail, PassSnapshot


def make_snapshot(
    origin=(60.0, 40.0),
    opponents=((70.0, 30.0), (70.0, 50.0), (85.0, 30.0), (85.0, 50.0)),
    receivers=((77.0, 40.0),),
    teammates_behind=((50.0, 40.0),),
    keeper=(110.0, 40.0),
    body_part="right_foot",
    set_piece=False,
    outcome="complete",
    end_location=(77.0, 40.0),
    under_pressure=False,
    visible_area=None,
    match_id="M1",
    event_id="E1",
    minute=10,
    second=0,
    period=1,
    team_id="T1",
    player_id="P1",
) -> PassSnapshot:
    """A snapshot satisfying every P3 rule unless a kwarg breaks one."""
    players = [FramePlayer(location=origin, teammate=True, actor=True, keeper=False)]
    players += [FramePlayer(location=r, teammate=True, actor=False, keeper=False) for r in receivers]
    players += [FramePlayer(location=t, teammate=True, actor=False, keeper=False) for t in teammates_behind]
    players += [FramePlayer(location=o, teammate=False, actor=False, keeper=False) for o in opponents]
    if keeper is not None:
        players.append(FramePlayer(location=keeper, teammate=False, actor=False, keeper=True))
    event = Event(
        event_id=event_id,
        match_id=match_id,
        minute=minute,
        second=second,
        period=period,
        team_id=team_id,
        player_id=player_id,
        event_kind="pass",
        location=origin,
        under_pressure=under_pressure,
        pass_detail=PassDetail(
            body_part=body_part,
            end_location=end_location,
            outcome=outcome,
            set_piece=set_piece,
        ),
    )
    frame = Frame360(event_id=event_id, visible_area=visible_area, players=tuple(players))
    return PassSnapshot(event=event, frame=frame)


@pytest.fixture(scope="session")
def toy_workspace(tmp_path_factory) -> Path:
    """A complete tiny pipeline run: 40 synthetic moments, rendered at
    64x64, a 1-epoch CNN, eval artifacts, and KPI tables."""
    work = tmp_path_factory.mktemp("toyws")
    flags = ["--work", str(work)]
    assert cli_run(["synth", "--n", "40", "--per-match", "20", "--seed", "7"] + flags) == 0
    assert cli_run(["detect"] + flags) == 0
    assert cli_run(["render", "--canvas", "64"] + flags) == 0
    assert cli_run(["train", "--method", "cnn", "--epochs", "1"] + flags) == 0
    assert cli_run(["eval"] + flags) == 0
    assert cli_run(["kpi", "--min-minutes", "0"] + flags) == 0
    return work

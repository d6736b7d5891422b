"""Acceptance suite: one test per criterion, each printing a pass/fail
line. Run with `pytest tests/test_acceptance.py -s` to watch the lines.

Everything here is property-based or anchored to published counts; no
licensed data is touched. Runtime bounds are asserted where the
criterion states one.
"""

from __future__ import annotations

import hashlib
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from p3engine.cli import run as cli_run
from p3engine.detect import detect_p3, read_moments
from p3engine.geometry import PitchGrid, convex_hull, voronoi_owner_grid, zone_contains
from p3engine.ingest import Roster, RosterPlayer
from p3engine.kpi import KpiFilters, player_kpi, team_attack_kpi, team_defense_kpi
from p3engine.metrics import (
    RocCurve,
    RocPoint,
    calibration,
    confusion,
    roc_curve,
    select_threshold,
)
from p3engine.model import (
    TrainCnnConfig,
    build_cnn,
    features_and_labels,
    gradient_check,
    labels_of,
    policy_for,
    render_inputs,
    split_moments,
    train_baseline,
    train_cnn,
)
from p3engine.service import build_app
from p3engine.synth import SynthConfig, generate_store
from tests.conftest import make_snapshot
from tests.test_geometry import brute_force_hull_vertices, brute_force_owners
from tests.test_metrics import mann_whitney_auc


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {number:02d}: {description}")
        raise
    print(f"[PASS] criterion {number:02d}: {description}")


def test_criterion_01_geometry_oracles():
    with criterion(1, "convex hull and voronoi match brute force, < 10 s"):
        started = time.perf_counter()
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            n = int(rng.integers(3, 23))
            pts = [(float(x), float(y)) for x, y in
                   zip(rng.uniform(0, 120, n), rng.uniform(0, 80, n))]
            hull = convex_hull(pts)
            expected = brute_force_hull_vertices(pts)
            assert hull is not None
            assert set(hull.vertices) == expected
        grid = PitchGrid(64, 64)
        for _ in range(100):
            n = int(rng.integers(1, 31))
            seeds = np.column_stack([rng.uniform(0, 120, n), rng.uniform(0, 80, n)])
            got = voronoi_owner_grid([tuple(s) for s in seeds], grid).owners
            assert np.array_equal(got, brute_force_owners(grid, seeds))
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"geometry oracles took {elapsed:.1f}s"


def test_criterion_02_zone_boundary():
    with criterion(2, "zone boundaries at 40 and 90, inclusive"):
        assert [zone_contains(x) for x in (39.999, 40.0, 90.0, 90.001)] == [
            False, True, True, False,
        ]


def test_criterion_03_auc_equals_pair_count():
    with criterion(3, "trapezoid AUC = Mann-Whitney statistic within 1e-12"):
        rng = np.random.default_rng(77)
        for trial in range(200):
            n = int(rng.integers(5, 501))
            if trial % 4 == 0:  # heavy ties
                scores = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], size=n)
            elif trial % 4 == 1:
                scores = rng.choice([0.1, 0.9], size=n)
            else:
                scores = rng.uniform(0, 1, n)
            labels = rng.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            got = roc_curve(scores, labels).auc
            want = mann_whitney_auc(scores, labels)
            assert abs(got - want) <= 1e-12


def test_criterion_04_confusion_anchor():
    with criterion(4, "published confusion counts reproduce totals and rates"):
        scores = np.concatenate([
            np.full(1244, 0.8), np.full(601, 0.05),
            np.full(4780, 0.8), np.full(9351, 0.05),
        ])
        labels = np.concatenate([
            np.ones(1244), np.ones(601), np.zeros(4780), np.zeros(9351),
        ]).astype(int)
        m = confusion(scores, labels, 0.1038)
        assert (m.tp, m.fn, m.fp, m.tn) == (1244, 601, 4780, 9351)
        assert m.total == 15976
        assert m.tpr == pytest.approx(0.6743, abs=1e-4)
        assert m.fpr == pytest.approx(0.3383, abs=1e-4)
        positive_share = (m.tp + m.fn) / m.total
        assert positive_share == pytest.approx(1845 / 15976, abs=1e-12)
        assert abs((1.0 - positive_share) - 0.88) <= 0.01


def test_criterion_05_threshold_rule():
    with criterion(5, "operating threshold nearest the (fpr 0, tpr 1) corner"):
        hand_built = RocCurve(
            points=[RocPoint(0.0, 0.0, 1.0), RocPoint(0.2, 0.9, 0.3), RocPoint(1.0, 1.0, 0.0)],
            auc=0.85,
        )
        assert select_threshold(hand_built) == 0.3
        perfect = roc_curve([0.9, 0.7, 0.3, 0.1], [1, 1, 0, 0])
        corner = next(p for p in perfect.points if p.fpr == 0.0 and p.tpr == 1.0)
        assert select_threshold(perfect) == corner.threshold


def test_criterion_06_gradient_gate():
    with criterion(6, "gradient check: default net < 1e-3, affine < 1e-7, < 60 s"):
        started = time.perf_counter()
        rng = np.random.default_rng(11)
        x = rng.uniform(0, 1, (4, 3, 8, 8))
        y = np.array([0.0, 1.0, 1.0, 0.0])
        default_net = build_cnn(seed=3, input_shape=(3, 8, 8))
        assert gradient_check(default_net, x, y) < 1e-3
        affine = build_cnn(
            ({"kind": "flatten"}, {"kind": "dense", "in_features": 192, "out_features": 1}),
            seed=5,
            input_shape=(3, 8, 8),
        )
        assert gradient_check(affine, x, y) < 1e-7
        elapsed = time.perf_counter() - started
        assert elapsed < 60.0, f"gradient gate took {elapsed:.1f}s"


def test_criterion_07_overfit_sanity(tmp_path):
    with criterion(7, "train BCE < 0.05 on 32 images within 300 epochs, deterministic"):
        started = time.perf_counter()
        generate_store(SynthConfig(n=32, seed=13, per_match=16), tmp_path / "store")
        moments = []
        from p3engine.detect import scan_corpus

        moments, _ = scan_corpus(tmp_path / "store")
        assert len(moments) == 32
        x = render_inputs(moments, 64)
        y = labels_of(moments).astype(float)
        cfg = TrainCnnConfig(lr=0.1, momentum=0.9, epochs=300, batch_size=16, seed=0)
        model = build_cnn(seed=0)
        report = train_cnn(model, x, y, cfg)
        hits = [i for i, v in enumerate(report.train_losses) if v < 0.05]
        assert hits, "never reached BCE < 0.05 in 300 epochs"
        # determinism per seed: a rerun reproduces the loss trajectory
        # prefix exactly (per-epoch rng draws do not depend on the total)
        model2 = build_cnn(seed=0)
        report2 = train_cnn(
            model2, x, y, TrainCnnConfig(lr=0.1, momentum=0.9, epochs=5, batch_size=16, seed=0)
        )
        assert report2.train_losses == report.train_losses[:5]
        elapsed = time.perf_counter() - started
        assert elapsed < 600.0, f"overfit sanity took {elapsed:.1f}s"
        print(f"  (reached {report.train_losses[hits[0]]:.4f} at epoch {hits[0]}, {elapsed:.0f}s)")


def test_criterion_08_method_gap(tmp_path):
    with criterion(8, "baseline val AUC <= 0.60 < 0.85 <= CNN val AUC on synth corpus"):
        started = time.perf_counter()
        generate_store(SynthConfig(n=700, seed=7, per_match=100), tmp_path / "store")
        from p3engine.detect import scan_corpus

        moments, _ = scan_corpus(tmp_path / "store")
        train_set, val_set = split_moments(moments, policy_for(moments))
        assert (len(train_set), len(val_set)) == (500, 200)
        xt, yt = features_and_labels(train_set)
        xv, yv = features_and_labels(val_set)
        _, baseline_report = train_baseline(xt, yt.astype(float), val=(xv, yv.astype(float)))
        images_train = render_inputs(train_set, 64)
        images_val = render_inputs(val_set, 64)
        cnn = build_cnn(seed=7)
        cnn_report = train_cnn(
            cnn,
            images_train,
            labels_of(train_set).astype(float),
            TrainCnnConfig(lr=0.05, momentum=0.9, epochs=8, batch_size=16, seed=7),
            val=(images_val, labels_of(val_set).astype(float)),
        )
        assert baseline_report.val_auc <= 0.60
        assert cnn_report.val_auc >= 0.85
        assert cnn_report.val_auc > baseline_report.val_auc
        elapsed = time.perf_counter() - started
        assert elapsed < 1800.0, f"method gap took {elapsed:.1f}s"
        print(
            f"  (baseline {baseline_report.val_auc:.3f} vs cnn {cnn_report.val_auc:.3f},"
            f" {elapsed:.0f}s)"
        )


def test_criterion_09_calibration_property():
    with criterion(9, ">= 9 of 10 calibration bins within 0.03 on calibrated data"):
        rng = np.random.default_rng(53)
        scores = rng.uniform(0, 1, 10_000)
        labels = (rng.uniform(0, 1, 10_000) < scores).astype(int)
        bins = calibration(scores, labels, n_bins=10)
        close = sum(abs(b.mean_predicted - b.observed_rate) < 0.03 for b in bins)
        assert close >= 9


def test_criterion_10_kpi_oracle():
    with criterion(10, "toy-league KPIs match hand-computed values exactly"):
        def entry(pid, team):
            return RosterPlayer(player_id=pid, name=pid, team_id=team,
                                position_name="Right Center Back", birth_date=None)

        def moments_for(match_id, team, pid, potential, penetrative):
            out = []
            for i in range(potential):
                snap = make_snapshot(
                    match_id=match_id, event_id=f"{match_id}-{pid}-{i}", team_id=team,
                    player_id=pid, outcome="complete" if i < penetrative else "incomplete",
                    minute=i % 90,
                )
                out.append(detect_p3(snap))
            return out

        # 4 matches: A-B, A-B, A-C, B-C
        moments = (
            moments_for("m1", "A", "a1", 10, 5)
            + moments_for("m1", "B", "b1", 4, 1)
            + moments_for("m2", "A", "a1", 6, 2)
            + moments_for("m2", "B", "b2", 8, 2)
            + moments_for("m3", "A", "a2", 10, 3)
            + moments_for("m3", "C", "c1", 5, 5)
            + moments_for("m4", "B", "b1", 12, 0)
            + moments_for("m4", "C", "c1", 9, 3)
        )
        players = {p: entry(p, t) for p, t in
                   (("a1", "A"), ("a2", "A"), ("b1", "B"), ("b2", "B"), ("c1", "C"))}
        rosters = {m: Roster(match_id=m, players=players, starting=set(players),
                             substitutions=[], team_ids=t)
                   for m, t in (("m1", ("A", "B")), ("m2", ("A", "B")),
                                ("m3", ("A", "C")), ("m4", ("B", "C")))}
        minutes = {"a1": 2000, "a2": 1100, "b1": 2000, "b2": 1500, "c1": 1200}

        rows = player_kpi(moments, minutes, rosters, "defender", KpiFilters(min_minutes=1140))
        by_id = {r.player_id: r for r in rows}
        # a1: 16 potential / 7 penetrative; the 10/5 -> 50% case is b1+... use b2? hand-check:
        assert by_id["a1"].potential == 16 and by_id["a1"].penetrative == 7
        assert "a2" not in by_id  # 1,100 minutes < 1140 (Fig 11 caption rule)
        # median filter over active potentials {a1:16, a2 excluded by minutes AFTER count filter?
        # potentials among group actives: {16, 10, 16, 8, 14}; median 14
        # kept: a1 (16 >= 14), b1 (16 >= 14), c1 (14 >= 14, tie passes)
        assert set(by_id) == {"a1", "b1", "c1"}
        assert by_id["c1"].potential == 14 and by_id["c1"].penetrative == 8

        # the 10-potential / 5-penetrative -> 50% case, via a permissive filter
        solo = player_kpi(
            moments_for("mx", "A", "solo", 10, 5),
            {"solo": 2000},
            {"mx": Roster(match_id="mx", players={"solo": entry("solo", "A")},
                          starting={"solo"}, substitutions=[], team_ids=("A", "B"))},
            "defender",
            KpiFilters(min_minutes=0),
        )
        assert solo[0].potential == 10 and solo[0].penetrative == 5
        assert solo[0].p3_percentage == 0.5

        attack = team_attack_kpi(moments)
        by_team = {r.team_id: r for r in attack}
        assert by_team["A"].potential == 26 and by_team["A"].penetrative == 10
        assert by_team["B"].potential == 24 and by_team["B"].penetrative == 3
        assert by_team["C"].potential == 14 and by_team["C"].penetrative == 8
        assert sum(r.potential for r in attack) == len(moments) == 64

        match_teams = {"m1": ("A", "B"), "m2": ("A", "B"), "m3": ("A", "C"), "m4": ("B", "C")}
        defense, warnings = team_defense_kpi(moments, match_teams)
        assert warnings == []
        rates = {r.team_id: r for r in defense}
        assert rates["A"].opponent_potential_per_match == pytest.approx((4 + 8 + 5) / 3)
        assert rates["B"].opponent_potential_per_match == pytest.approx((10 + 6 + 9) / 3)
        assert rates["C"].opponent_potential_per_match == pytest.approx((10 + 12) / 2)
        conceded_total = sum(r.opponent_potential_per_match * r.matches_played for r in defense)
        assert conceded_total == pytest.approx(len(moments))


def test_criterion_11_end_to_end_determinism(tmp_path):
    with criterion(11, "two seeded pipeline runs are byte-identical"):
        def run_pipeline(work: Path) -> dict[str, bytes]:
            flags = ["--work", str(work), "--seed", "7"]
            assert cli_run(["synth", "--n", "60", "--per-match", "20"] + flags) == 0
            assert cli_run(["detect"] + flags) == 0
            assert cli_run(["render", "--canvas", "64"] + flags) == 0
            assert cli_run(["train", "--method", "cnn", "--epochs", "2"] + flags) == 0
            assert cli_run(["eval"] + flags) == 0
            out = {"moments.jsonl": (work / "store" / "moments.jsonl").read_bytes(),
                   "cnn.p3m": (work / "models" / "cnn.p3m").read_bytes()}
            for png in sorted((work / "images").glob("*.png")):
                out[f"images/{png.name}"] = png.read_bytes()
            for artifact in ("roc.json", "confusion.json", "calibration.json",
                             "histogram.json", "scores.jsonl"):
                out[f"eval/{artifact}"] = (work / "eval" / artifact).read_bytes()
            return out

        first = run_pipeline(tmp_path / "run1")
        second = run_pipeline(tmp_path / "run2")
        assert first.keys() == second.keys()
        assert len([k for k in first if k.startswith("images/")]) == 60
        for name in first:
            assert first[name] == second[name], f"{name} differs between runs"


def test_criterion_12_service_contract(toy_workspace: Path):
    with criterion(12, "service pagination, what-if, and read-only invariance"):
        app = build_app(
            store_dir=toy_workspace / "store",
            images_dir=toy_workspace / "images",
            eval_dir=toy_workspace / "eval",
            kpi_dir=toy_workspace / "kpi",
            models_dir=toy_workspace / "models",
        )
        client = TestClient(app)

        def store_digest() -> str:
            acc = hashlib.sha256()
            for path in sorted((toy_workspace / "store").rglob("*")):
                if path.is_file():
                    acc.update(path.name.encode())
                    acc.update(path.read_bytes())
            return acc.hexdigest()

        before = store_digest()

        # pagination enumerates every moment exactly once
        seen: list[str] = []
        offset = 0
        while True:
            body = client.get("/api/v1/moments", params={"offset": offset, "limit": 9}).json()
            seen += [i["moment_id"] for i in body["items"]]
            offset += 9
            if offset >= body["total"]:
                break
        assert len(seen) == len(set(seen)) == body["total"] == 40

        # identity what-if: original probability, bit-equal
        mid = seen[0]
        detail = client.get(f"/api/v1/moments/{mid}").json()
        actor = next(i for i, p in enumerate(detail["all_players"]) if p["actor"])
        ax, ay = detail["all_players"][actor]["location"]
        identity = client.post(
            f"/api/v1/moments/{mid}/whatif",
            json={"edits": [{"player": actor, "x": ax, "y": ay}]},
        ).json()
        assert identity["still_p3"] is True
        assert identity["probability"] == detail["probability"]

        # receiver removal
        removal = client.post(
            f"/api/v1/moments/{mid}/whatif",
            json={"edits": [{"player": 1, "x": 1.0, "y": 1.0}]},
        ).json()
        assert removal["still_p3"] is False
        assert removal["rejection_reason"] == "no receiver inside hull"

        # 1,000 mixed requests leave the store untouched
        requests_made = 0
        i = 0
        while requests_made < 1000:
            mid_i = seen[i % len(seen)]
            client.get("/api/v1/moments", params={"offset": i % 11, "limit": 5})
            client.get(f"/api/v1/moments/{mid_i}")
            client.get(f"/api/v1/moments/{mid_i}/image.png")
            client.post(
                f"/api/v1/moments/{mid_i}/whatif",
                json={"edits": [{"player": 1, "x": 50.0 + (i % 20), "y": 30.0 + (i % 15)}]},
            )
            client.get("/api/v1/kpi/teams", params={"side": "attack"})
            client.get("/api/v1/model/histogram")
            requests_made += 6
            i += 1
        assert store_digest() == before

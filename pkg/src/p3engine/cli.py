"""Pipeline driver: one executable, one subcommand per stage.

Stages write their outputs plus a manifest recording the config, the
seed, and SHA-256 hashes of inputs and outputs, so consecutive stages
chain verifiably and a rerun with unchanged inputs is byte-identical
(manifests themselves carry wall-clock durations and are metadata, not
outputs). Configuration precedence: defaults < config file < P3_*
environment < flags. Exit codes: 0 success, 1 usage error, 2 data
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from p3engine.detect import DetectConfig, read_moments, scan_corpus, write_moments
from p3engine.errors import P3Error, StageError
from p3engine.ingest import ingest_tree, read_match_meta, read_rosters
from p3engine.jsonio import read_json, sha256_file, write_json, write_jsonl
from p3engine.kpi import (
    GROUPS,
    KpiFilters,
    minutes_played,
    player_kpi,
    team_attack_kpi,
    team_defense_kpi,
    write_kpi_csv,
)
from p3engine.metrics import (
    calibration,
    confusion,
    roc_curve,
    score_distribution,
    select_threshold,
    write_eval_artifacts,
)
from p3engine.model import (
    TrainCnnConfig,
    build_cnn,
    cnn_forward_batch,
    features_and_labels,
    labels_of,
    load_model,
    render_inputs,
    save_model,
    split_moments,
    train_baseline,
    train_cnn,
)
from p3engine.model.baseline import BaselineModel, predict_baseline_batch
from p3engine.model.dataset import policy_for
from p3engine.render import RenderConfig, render_png
from p3engine.synth import SynthConfig, generate_store

USAGE_ERROR = 1
DATA_ERROR = 2

_ENV_PREFIX = "P3_"


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the CLI contract says 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(USAGE_ERROR)


@dataclass
class Paths:
    work: Path
    data: Path | None
    store: Path
    models: Path
    images: Path
    eval_dir: Path
    kpi_dir: Path


def _resolve(args: argparse.Namespace, env: dict, cfg_file: dict) -> Paths:
    def pick(name: str, default):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        env_val = env.get(_ENV_PREFIX + name.upper())
        if env_val is not None:
            return env_val
        if name in cfg_file:
            return cfg_file[name]
        return default

    work = Path(pick("work", "p3work"))
    data = pick("data", None)
    return Paths(
        work=work,
        data=Path(data) if data else None,
        store=Path(pick("store", work / "store")),
        models=Path(pick("models", work / "models")),
        images=Path(pick("images", work / "images")),
        eval_dir=Path(pick("eval", work / "eval")),
        kpi_dir=Path(pick("kpi", work / "kpi")),
    )


def _pick_value(args, env, cfg_file, name: str, default, cast=None):
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    env_val = env.get(_ENV_PREFIX + name.upper())
    if env_val is not None:
        return cast(env_val) if cast else env_val
    if name in cfg_file:
        return cfg_file[name]
    return default


def _hash_tree(paths: Sequence[Path]) -> dict[str, str]:
    out = {}
    for p in sorted(paths):
        if p.is_file():
            out[p.name] = sha256_file(p)
    return out


def _write_manifest(out_dir: Path, stage: str, inputs: dict, outputs: dict, config: dict,
                    seed: int, started: float) -> None:
    write_json(
        Path(out_dir) / f"{stage}_manifest.json",
        {
            "stage": stage,
            "inputs": inputs,
            "outputs": outputs,
            "config": config,
            "seed": seed,
            "duration_s": round(time.perf_counter() - started, 3),
        },
    )


def _cmd_synth(args, env, cfg_file) -> int:
    paths = _resolve(args, env, cfg_file)
    seed = int(_pick_value(args, env, cfg_file, "seed", 7, int))
    started = time.perf_counter()
    cfg = SynthConfig(n=args.n, seed=seed, per_match=args.per_match)
    generate_store(cfg, paths.store)
    _write_manifest(
        paths.store, "synth", {}, _hash_tree(list(paths.store.glob("*.jsonl")) + [paths.store / "manifest.json"]),
        {"n": cfg.n, "per_match": cfg.per_match}, seed, started,
    )
    print(f"synth: wrote {cfg.n} snapshots to {paths.store}")
    return 0


def _cmd_ingest(args, env, cfg_file) -> int:
    paths = _resolve(args, env, cfg_file)
    if paths.data is None:
        raise StageError("ingest needs --data pointing at events/, three-sixty/, lineups/")
    seed = int(_pick_value(args, env, cfg_file, "seed", 7, int))
    started = time.perf_counter()
    inputs = _hash_tree(list(paths.data.glob("*/*.json")))
    manifest = ingest_tree(paths.data, paths.store)
    outputs = _hash_tree(list(paths.store.glob("*.jsonl")) + [paths.store / "manifest.json"])
    _write_manifest(paths.store, "ingest", inputs, outputs, {}, seed, started)
    totals = {k: sum(m[k] for m in manifest["matches"].values()) for k in ("passes", "snapshots", "unmatched", "clamped")}
    print(f"ingest: {len(manifest['matches'])} matches, {totals}")
    return 0


def _detect_config(args, env, cfg_file) -> DetectConfig:
    return DetectConfig(
        min_opponents_for_hull=int(_pick_value(args, env, cfg_file, "min_opponents", 3, int)),
        boundary_counts_inside=bool(_pick_value(args, env, cfg_file, "boundary_inside", True)),
        zone_lo=float(_pick_value(args, env, cfg_file, "zone_lo", 40.0, float)),
        zone_hi=float(_pick_value(args, env, cfg_file, "zone_hi", 90.0, float)),
        exclude_set_pieces=bool(_pick_value(args, env, cfg_file, "exclude_set_pieces", True)),
    )


def _cmd_detect(args, env, cfg_file) -> int:
    paths = _resolve(args, env, cfg_file)
    seed = int(_pick_value(args, env, cfg_file, "seed", 7, int))
    cfg = _detect_config(args, env, cfg_file)
    started = time.perf_counter()
    inputs = _hash_tree(list(paths.store.glob("*.snapshots.jsonl")) + [paths.store / "manifest.json"])
    moments, report = scan_corpus(paths.store, cfg)
    write_moments(paths.store, moments, report)
    outputs = _hash_tree([paths.store / "moments.jsonl", paths.store / "detect_report.json"])
    _write_manifest(paths.store, "detect", inputs, outputs, cfg.to_json(), seed, started)
    print(
        f"detect: {report.moments} moments from {report.snapshots} snapshots"
        f" (positive share {report.positive_share:.3f}), rejections {report.rejections}"
    )
    return 0


def _cmd_render(args, env, cfg_file) -> int:
    paths = _resolve(args, env, cfg_file)
    seed = int(_pick_value(args, env, cfg_file, "seed", 7, int))
    size = int(_pick_value(args, env, cfg_file, "canvas", 224, int))
    cfg = RenderConfig(width=size, height=size)
    started = time.perf_counter()
    moments = read_moments(paths.store)
    inputs = _hash_tree([paths.store / "moments.jsonl"])
    paths.images.mkdir(parents=True, exist_ok=True)
    index_rows = []
    for m in moments:
        (paths.images / f"{m.moment_id}.png").write_bytes(render_png(m, cfg))
        index_rows.append({"moment_id": m.moment_id, "label": m.label, "match_id": m.match_id})
    write_jsonl(paths.images / "index.jsonl", index_rows)
    outputs = {"index.jsonl": sha256_file(paths.images / "index.jsonl")}
    _write_manifest(paths.images, "render", inputs, outputs, cfg.to_json(), seed, started)
    print(f"render: {len(moments)} images at {size}x{size} -> {paths.images}")
    return 0


def _cmd_train(args, env, cfg_file) -> int:
    paths = _resolve(args, env, cfg_file)
    seed = int(_pick_value(args, env, cfg_file, "seed", 7, int))
    started = time.perf_counter()
    moments = read_moments(paths.store)
    inputs = _hash_tree([paths.store / "moments.jsonl"])
    train_set, val_set = split_moments(moments, policy_for(moments))
    if not train_set or not val_set:
        raise StageError("not enough matches to split into train/validation")
    method = args.method
    if method == "baseline":
        xt, yt = features_and_labels(train_set)
        xv, yv = features_and_labels(val_set)
        epochs = int(_pick_value(args, env, cfg_file, "epochs", 500, int))
        lr = float(_pick_value(args, env, cfg_file, "lr", 1.0, float))
        model, report = train_baseline(xt, yt, lr=lr, epochs=epochs, seed=seed, val=(xv, yv))
        out_path = paths.models / "baseline.p3m"
        config = {"method": "baseline", "lr": lr, "epochs": epochs}
    else:
        input_size = int(_pick_value(args, env, cfg_file, "input_size", 64, int))
        tc = TrainCnnConfig(
            lr=float(_pick_value(args, env, cfg_file, "lr", 0.05, float)),
            momentum=float(_pick_value(args, env, cfg_file, "momentum", 0.9, float)),
            epochs=int(_pick_value(args, env, cfg_file, "epochs", 8, int)),
            batch_size=int(_pick_value(args, env, cfg_file, "batch_size", 16, int)),
            seed=seed,
        )
        xt = render_inputs(train_set, input_size)
        xv = render_inputs(val_set, input_size)
        model = build_cnn(seed=seed, input_shape=(3, input_size, input_size))
        report = train_cnn(model, xt, labels_of(train_set).astype(float), tc,
                           val=(xv, labels_of(val_set).astype(float)))
        out_path = paths.models / "cnn.p3m"
        config = {"method": "cnn", "lr": tc.lr, "momentum": tc.momentum, "epochs": tc.epochs,
                  "batch_size": tc.batch_size, "input_size": input_size}
    save_model(model, out_path)
    write_json(out_path.with_suffix(".report.json"), report.to_json())
    _write_manifest(paths.models, f"train_{method}", inputs,
                    {out_path.name: sha256_file(out_path)}, config, seed, started)
    auc = "n/a" if report.val_auc is None else f"{report.val_auc:.3f}"
    print(f"train[{method}]: {out_path} (val AUC {auc}, {report.wall_clock_s:.1f}s)")
    return 0


def _score_all(moments, model, input_size: int) -> np.ndarray:
    if isinstance(model, BaselineModel):
        x, _ = features_and_labels(moments)
        return predict_baseline_batch(model, x)
    # One image per forward call: the what-if endpoint rescores single
    # moments, and its results must be bit-equal to these.
    scores = np.empty(len(moments))
    for i, m in enumerate(moments):
        scores[i] = cnn_forward_batch(model, render_inputs([m], input_size))[0]
    return scores


def _cmd_eval(args, env, cfg_file) -> int:
    paths = _resolve(args, env, cfg_file)
    seed = int(_pick_value(args, env, cfg_file, "seed", 7, int))
    started = time.perf_counter()
    method = args.method
    model_path = Path(args.model) if args.model else paths.models / f"{method}.p3m"
    if not model_path.exists():
        raise StageError(f"missing model {model_path}: run `p3 train --method {method}` first")
    moments = read_moments(paths.store)
    inputs = _hash_tree([paths.store / "moments.jsonl", model_path])
    model = load_model(model_path)
    input_size = model.input_shape[1] if hasattr(model, "input_shape") else 64
    train_set, val_set = split_moments(moments, policy_for(moments))
    scores_all = _score_all(moments, model, input_size)
    split_of = {m.moment_id: "train" for m in train_set}
    split_of.update({m.moment_id: "val" for m in val_set})
    write_jsonl(
        paths.eval_dir / "scores.jsonl",
        (
            {"moment_id": m.moment_id, "probability": float(s), "split": split_of[m.moment_id]}
            for m, s in zip(moments, scores_all)
        ),
    )
    val_ids = {m.moment_id for m in val_set}
    val_mask = np.array([m.moment_id in val_ids for m in moments])
    val_scores = scores_all[val_mask]
    val_labels = labels_of([m for m in moments if m.moment_id in val_ids])
    curve = roc_curve(val_scores, val_labels)
    threshold = select_threshold(curve)
    matrix = confusion(val_scores, val_labels, threshold)
    bins = calibration(val_scores, val_labels) if val_scores.size >= 10 else []
    hist = score_distribution(val_scores)
    write_eval_artifacts(paths.eval_dir, curve, matrix, bins, hist)
    outputs = _hash_tree(
        [paths.eval_dir / n for n in ("roc.json", "confusion.json", "calibration.json", "histogram.json", "scores.jsonl")]
    )
    _write_manifest(paths.eval_dir, "eval", inputs, outputs,
                    {"method": method, "threshold": threshold}, seed, started)
    print(f"eval[{method}]: val AUC {curve.auc:.3f}, threshold {threshold:.4f} -> {paths.eval_dir}")
    return 0


def _cmd_kpi(args, env, cfg_file) -> int:
    paths = _resolve(args, env, cfg_file)
    seed = int(_pick_value(args, env, cfg_file, "seed", 7, int))
    started = time.perf_counter()
    moments = read_moments(paths.store)
    rosters = read_rosters(paths.store)
    meta = read_match_meta(paths.store)
    if not rosters:
        raise StageError(f"no rosters.json in {paths.store}: ingest lineups or use `p3 synth`")
    inputs = _hash_tree([paths.store / "moments.jsonl", paths.store / "rosters.json", paths.store / "matches.json"])
    filters = KpiFilters(
        min_minutes=int(_pick_value(args, env, cfg_file, "min_minutes", 1140, int)),
        count_mode=_pick_value(args, env, cfg_file, "count_mode", "group_median"),
        fixed_count=int(_pick_value(args, env, cfg_file, "fixed_count", 30, int)),
    )
    minutes = minutes_played(rosters, {mid: m["end_minute"] for mid, m in meta.items()})
    groups = [args.group] if args.group else list(GROUPS)
    wrote = []
    paths.kpi_dir.mkdir(parents=True, exist_ok=True)
    if not args.teams_only:
        for group in groups:
            rows = player_kpi(moments, minutes, rosters, group, filters)
            write_json(paths.kpi_dir / f"players_{group}.json", [r.to_json() for r in rows])
            write_kpi_csv(paths.kpi_dir / f"players_{group}.csv", rows)
            wrote.append(f"players_{group}({len(rows)})")
    if not args.group:
        attack = team_attack_kpi(moments)
        write_json(paths.kpi_dir / "teams_attack.json", [r.to_json() for r in attack])
        write_kpi_csv(paths.kpi_dir / "teams_attack.csv", attack)
        match_teams = {mid: m["teams"] for mid, m in meta.items()}
        defense, warnings = team_defense_kpi(moments, match_teams)
        write_json(paths.kpi_dir / "teams_defense.json", [r.to_json() for r in defense])
        write_kpi_csv(paths.kpi_dir / "teams_defense.csv", defense)
        wrote += [f"teams_attack({len(attack)})", f"teams_defense({len(defense)})"]
        for w in warnings:
            print(f"kpi warning: {w}", file=sys.stderr)
    outputs = _hash_tree(list(paths.kpi_dir.glob("*.json")))
    _write_manifest(paths.kpi_dir, "kpi", inputs, outputs,
                    {"min_minutes": filters.min_minutes, "count_mode": filters.count_mode}, seed, started)
    print(f"kpi: wrote {', '.join(wrote)} -> {paths.kpi_dir}")
    return 0


def _cmd_serve(args, env, cfg_file) -> int:
    import uvicorn

    from p3engine.service import build_app

    paths = _resolve(args, env, cfg_file)
    app = build_app(
        store_dir=paths.store,
        images_dir=paths.images,
        eval_dir=paths.eval_dir,
        kpi_dir=paths.kpi_dir,
        models_dir=paths.models,
        model_path=Path(args.model) if args.model else None,
        cors_origins=args.cors_origin or ["http://localhost:5173", "http://localhost:8080"],
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat JSON config file")
    p.add_argument("--seed", type=int, help="pipeline seed (default 7)")
    p.add_argument("--work", help="workspace root (default ./p3work)")
    p.add_argument("--data", help="raw StatsBomb data directory")
    p.add_argument("--store", help="normalized store directory")
    p.add_argument("--models", help="model directory")
    p.add_argument("--images", help="rendered image directory")
    p.add_argument("--eval", help="evaluation artifact directory")
    p.add_argument("--kpi", help="KPI artifact directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="p3", description="Potential Penetrative Pass analytics pipeline")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("synth", parents=[], help="generate the seeded synthetic corpus")
    _add_common(p)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--per-match", dest="per_match", type=int, default=100)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="parse raw StatsBomb files into the store")
    _add_common(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("detect", help="detect P3 moments in the store")
    _add_common(p)
    p.add_argument("--min-opponents", dest="min_opponents", type=int)
    p.add_argument("--zone-lo", dest="zone_lo", type=float)
    p.add_argument("--zone-hi", dest="zone_hi", type=float)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("render", help="render moment images")
    _add_common(p)
    p.add_argument("--canvas", type=int, help="canvas size in pixels (default 224)")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("train", help="train a classifier")
    _add_common(p)
    p.add_argument("--method", choices=["baseline", "cnn"], default="cnn")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--momentum", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--input-size", dest="input_size", type=int)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score the corpus and write evaluation artifacts")
    _add_common(p)
    p.add_argument("--method", choices=["baseline", "cnn"], default="cnn")
    p.add_argument("--model", help="explicit model path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("kpi", help="aggregate player/team KPI tables")
    _add_common(p)
    p.add_argument("--group", choices=list(GROUPS))
    p.add_argument("--teams", dest="teams_only", action="store_true", help="team tables only")
    p.add_argument("--min-minutes", dest="min_minutes", type=int)
    p.add_argument("--count-mode", dest="count_mode", choices=["group_median", "fixed"])
    p.add_argument("--fixed-count", dest="fixed_count", type=int)
    p.set_defaults(func=_cmd_kpi)

    p = sub.add_parser("serve", help="run the explorer HTTP API")
    _add_common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8300)
    p.add_argument("--model", help="model file for what-if scoring (default models/cnn.p3m)")
    p.add_argument("--cors-origin", action="append")
    p.set_defaults(func=_cmd_serve)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        parser.print_help()
        return USAGE_ERROR
    env = dict(os.environ)
    cfg_file = {}
    if getattr(args, "config", None):
        try:
            cfg_file = read_json(args.config)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return DATA_ERROR
    try:
        return args.func(args, env, cfg_file)
    except P3Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (FloatingPointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()

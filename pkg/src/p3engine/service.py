"""HTTP API serving moments, images, model scores, KPI tables, and
what-if rescoring to the explorer UI.

The service snapshots the store into an immutable in-memory index at
startup; every endpoint is read-only on disk. What-if requests apply
position edits to a copy of the frame, rerun detection with the same
config as the corpus, and rescore with the loaded model -- the stored
moment never changes. The only mutable state is a bounded LRU cache of
what-if renders, which is purely an optimization: a cache bypass
produces identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import threading
from collections import OrderedDict
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from fastapi import Body, FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from p3engine.detect import (
    P3Moment,
    Rejection,
    detect_p3,
    moment_to_json,
    read_detect_config,
)
from p3engine.errors import ModelFormatError
from p3engine.ingest import Event, Frame360, FramePlayer, PassDetail, PassSnapshot
from p3engine.jsonio import read_jsonl
from p3engine.model.cnn import CnnModel, cnn_forward_batch
from p3engine.model.dataset import model_render_config, render_inputs
from p3engine.model.persist import load_model
from p3engine.pitch import in_pitch
from p3engine.render import RenderConfig, render_png

API_PREFIX = "/api/v1"
MAX_PAGE_LIMIT = 200
MAX_EDITS = 22
WHATIF_CACHE_SIZE = 1024

_MOMENT_FILTER_KEYS = {
    "team",
    "player",
    "match",
    "label",
    "prob_min",
    "prob_max",
    "zone_min",
    "zone_max",
    "under_pressure",
    "offset",
    "limit",
}

_MODEL_ARTIFACTS = {
    "roc": "roc.json",
    "calibration": "calibration.json",
    "histogram": "histogram.json",
    "confusion": "confusion.json",
}


class _LruCache:
    """Small thread-safe LRU keyed by request hash."""

    def __init__(self, capacity: int):
        self._capacity = capacity
        self._lock = threading.Lock()
        self._items: OrderedDict[str, object] = OrderedDict()

    def get(self, key: str):
        with self._lock:
            if key not in self._items:
                return None
            self._items.move_to_end(key)
            return self._items[key]

    def put(self, key: str, value) -> None:
        with self._lock:
            self._items[key] = value
            self._items.move_to_end(key)
            while len(self._items) > self._capacity:
                self._items.popitem(last=False)


@dataclass
class _Store:
    moments: list[P3Moment]
    by_id: dict[str, P3Moment]
    scores: dict[str, float]
    detect_cfg: object
    model: CnnModel | None
    image_cfg: RenderConfig


def _load_store(store_dir: Path, models_dir: Path, images_dir: Path,
                eval_dir: Path, model_path: Path | None) -> _Store:
    moments: list[P3Moment] = []
    moments_path = store_dir / "moments.jsonl"
    if moments_path.exists():
        from p3engine.detect import moment_from_json

        moments = [moment_from_json(obj) for obj in read_jsonl(moments_path)]
    scores: dict[str, float] = {}
    scores_path = eval_dir / "scores.jsonl"
    if scores_path.exists():
        for row in read_jsonl(scores_path):
            scores[row["moment_id"]] = float(row["probability"])
    model = None
    candidate = model_path if model_path else models_dir / "cnn.p3m"
    if candidate and Path(candidate).exists():
        try:
            loaded = load_model(Path(candidate))
            if isinstance(loaded, CnnModel):
                model = loaded
        except ModelFormatError:
            model = None
    image_cfg = RenderConfig()
    manifest = images_dir / "render_manifest.json"
    if manifest.exists():
        try:
            image_cfg = RenderConfig.from_json(json.loads(manifest.read_text())["config"])
        except (KeyError, ValueError, json.JSONDecodeError):
            image_cfg = RenderConfig()
    return _Store(
        moments=moments,
        by_id={m.moment_id: m for m in moments},
        scores=scores,
        detect_cfg=read_detect_config(store_dir),
        model=model,
        image_cfg=image_cfg,
    )


def _summary(m: P3Moment, probability: float | None) -> dict:
    return {
        "moment_id": m.moment_id,
        "match_id": m.match_id,
        "team_id": m.team_id,
        "player_id": m.player_id,
        "label": m.label,
        "probability": probability,
        "hull_area": m.hull_area,
        "origin": [m.origin[0], m.origin[1]],
        "under_pressure": m.under_pressure,
        "period": m.period,
        "minute": m.minute,
        "second": m.second,
    }


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message})


def _parse_float(params, key: str) -> float | None:
    raw = params.get(key)
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise _Invalid(f"{key} must be a number")


def _parse_int(params, key: str, default: int) -> int:
    raw = params.get(key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise _Invalid(f"{key} must be an integer")


class _Invalid(Exception):
    """Maps to HTTP 422: syntactically fine but semantically invalid."""


def _score_moment(store: _Store, moment: P3Moment) -> float:
    model = store.model
    assert model is not None
    x = render_inputs([moment], model.input_shape[1])
    return float(cnn_forward_batch(model, x)[0])


def _probability_of(store: _Store, moment: P3Moment) -> float | None:
    if moment.moment_id in store.scores:
        return store.scores[moment.moment_id]
    if store.model is not None:
        # Lazily computed originals use the same single-image path as
        # what-if rescoring, keeping the two bit-equal.
        prob = _score_moment(store, moment)
        store.scores[moment.moment_id] = prob
        return prob
    return None


def _apply_edits(moment: P3Moment, edits: Sequence[dict]) -> tuple[tuple[FramePlayer, ...], tuple[float, float]]:
    players = list(moment.all_players)
    origin = moment.origin
    for edit in edits:
        idx = edit["player"]
        pos = (float(edit["x"]), float(edit["y"]))
        players[idx] = replace(players[idx], location=pos)
        if players[idx].actor:
            origin = pos
    return tuple(players), origin


def _whatif_snapshot(moment: P3Moment, players: tuple[FramePlayer, ...],
                     origin: tuple[float, float]) -> PassSnapshot:
    basis = moment.label_basis
    event = Event(
        event_id=moment.event_id,
        match_id=moment.match_id,
        minute=moment.minute,
        second=moment.second,
        period=moment.period,
        team_id=moment.team_id,
        player_id=moment.player_id,
        event_kind="pass",
        location=origin,
        under_pressure=moment.under_pressure,
        pass_detail=PassDetail(
            body_part="right_foot",  # accepted moments are foot passes
            end_location=basis.end_location,
            outcome=basis.outcome,
            set_piece=False,
        ),
    )
    frame = Frame360(event_id=moment.event_id, visible_area=moment.visible_area, players=players)
    return PassSnapshot(event=event, frame=frame)


def build_app(
    store_dir: Path,
    images_dir: Path,
    eval_dir: Path,
    kpi_dir: Path,
    models_dir: Path,
    model_path: Path | None = None,
    cors_origins: Sequence[str] | None = None,
) -> FastAPI:
    store_dir = Path(store_dir)
    images_dir = Path(images_dir)
    eval_dir = Path(eval_dir)
    kpi_dir = Path(kpi_dir)
    models_dir = Path(models_dir)

    store = _load_store(store_dir, models_dir, images_dir, eval_dir, model_path)
    whatif_edits = _LruCache(WHATIF_CACHE_SIZE)
    whatif_images = _LruCache(WHATIF_CACHE_SIZE)

    app = FastAPI(title="P3 explorer API", version="1")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    def _file_response(path: Path, request: Request, media_type: str, hint: str) -> Response:
        if not path.exists():
            return _error(404, f"{path.name} not found: {hint}")
        body = path.read_bytes()
        etag = hashlib.sha256(body).hexdigest()
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        return Response(content=body, media_type=media_type, headers={"ETag": etag})

    @app.get(f"{API_PREFIX}/health")
    def health():
        return {
            "status": "ok",
            "moments": len(store.moments),
            "model_loaded": store.model is not None,
            "scores_loaded": len(store.scores),
        }

    @app.get(f"{API_PREFIX}/moments")
    def list_moments(request: Request):
        params = request.query_params
        unknown = set(params.keys()) - _MOMENT_FILTER_KEYS
        if unknown:
            return _error(400, f"unknown filter keys: {', '.join(sorted(unknown))}")
        try:
            offset = _parse_int(params, "offset", 0)
            limit = _parse_int(params, "limit", 50)
            prob_min = _parse_float(params, "prob_min")
            prob_max = _parse_float(params, "prob_max")
            zone_min = _parse_float(params, "zone_min")
            zone_max = _parse_float(params, "zone_max")
            if limit < 1 or limit > MAX_PAGE_LIMIT:
                raise _Invalid(f"limit must be in [1, {MAX_PAGE_LIMIT}]")
            if offset < 0:
                raise _Invalid("offset must be >= 0")
            if prob_min is not None and prob_max is not None and prob_min > prob_max:
                raise _Invalid("prob_min must not exceed prob_max")
            if zone_min is not None and zone_max is not None and zone_min > zone_max:
                raise _Invalid("zone_min must not exceed zone_max")
            label = params.get("label")
            if label is not None and label not in ("penetrative", "non_penetrative"):
                raise _Invalid("label must be penetrative or non_penetrative")
            pressure = params.get("under_pressure")
            if pressure is not None and pressure not in ("true", "false"):
                raise _Invalid("under_pressure must be true or false")
        except _Invalid as exc:
            return _error(422, str(exc))

        team, player, match = params.get("team"), params.get("player"), params.get("match")
        rows: list[tuple[float, str, P3Moment, float | None]] = []
        for m in store.moments:
            if team and m.team_id != team:
                continue
            if player and m.player_id != player:
                continue
            if match and m.match_id != match:
                continue
            if label and m.label != label:
                continue
            if pressure is not None and m.under_pressure != (pressure == "true"):
                continue
            if zone_min is not None and m.origin[0] < zone_min:
                continue
            if zone_max is not None and m.origin[0] > zone_max:
                continue
            prob = store.scores.get(m.moment_id)
            if prob_min is not None and (prob is None or prob < prob_min):
                continue
            if prob_max is not None and (prob is None or prob > prob_max):
                continue
            sort_prob = prob if prob is not None else -1.0
            rows.append((sort_prob, m.moment_id, m, prob))
        rows.sort(key=lambda r: (-r[0], r[1]))
        page = rows[offset : offset + limit]
        return {
            "items": [_summary(m, prob) for _, _, m, prob in page],
            "total": len(rows),
            "offset": offset,
            "limit": limit,
        }

    @app.get(f"{API_PREFIX}/moments/{{moment_id}}")
    def get_moment(moment_id: str):
        moment = store.by_id.get(moment_id)
        if moment is None:
            return _error(404, f"unknown moment {moment_id}")
        payload = moment_to_json(moment)
        payload["probability"] = _probability_of(store, moment)
        payload["hull_area"] = moment.hull_area
        return payload

    @app.get(f"{API_PREFIX}/moments/{{moment_id}}/image.png")
    def get_moment_image(moment_id: str, request: Request):
        if moment_id not in store.by_id:
            return _error(404, f"unknown moment {moment_id}")
        path = images_dir / f"{moment_id}.png"
        return _file_response(path, request, "image/png", "run `p3 render` first")

    @app.post(f"{API_PREFIX}/moments/{{moment_id}}/whatif")
    def whatif(moment_id: str, payload: dict = Body(...)):
        moment = store.by_id.get(moment_id)
        if moment is None:
            return _error(404, f"unknown moment {moment_id}")
        if store.model is None:
            return _error(404, "no model loaded: run `p3 train --method cnn` first")
        edits = payload.get("edits")
        if not isinstance(edits, list) or len(edits) > MAX_EDITS:
            return _error(422, f"edits must be a list of at most {MAX_EDITS} entries")
        for edit in edits:
            if not isinstance(edit, dict) or not {"player", "x", "y"} <= set(edit):
                return _error(422, "each edit needs player, x, y")
            idx = edit["player"]
            if not isinstance(idx, int) or not 0 <= idx < len(moment.all_players):
                return _error(422, f"player index out of range: {idx}")
            if not in_pitch(float(edit["x"]), float(edit["y"])):
                return _error(422, f"coordinates out of pitch bounds: {edit['x']}, {edit['y']}")

        players, origin = _apply_edits(moment, edits)
        snapshot = _whatif_snapshot(moment, players, origin)
        result = detect_p3(snapshot, store.detect_cfg)
        original = _probability_of(store, moment)
        if isinstance(result, Rejection):
            return {
                "still_p3": False,
                "rejection_reason": result.reason,
                "probability": None,
                "original_probability": original,
                "hull": None,
                "image_ref": None,
            }
        probability = _score_moment(store, result)
        key_src = json.dumps({"moment_id": moment_id, "edits": edits}, sort_keys=True)
        key = hashlib.sha256(key_src.encode()).hexdigest()[:24]
        whatif_edits.put(key, (moment_id, tuple((e["player"], float(e["x"]), float(e["y"])) for e in edits)))
        return {
            "still_p3": True,
            "rejection_reason": None,
            "probability": probability,
            "original_probability": original,
            "hull": [[x, y] for x, y in result.hull.vertices],
            "image_ref": f"{API_PREFIX}/whatif/{key}/image.png",
        }

    @app.get(f"{API_PREFIX}/whatif/{{key}}/image.png")
    def whatif_image(key: str):
        cached = whatif_images.get(key)
        if cached is not None:
            return Response(content=cached, media_type="image/png")
        entry = whatif_edits.get(key)
        if entry is None:
            return _error(404, "unknown or expired what-if key: POST the whatif again")
        moment_id, edits = entry
        moment = store.by_id[moment_id]
        players, origin = _apply_edits(
            moment, [{"player": p, "x": x, "y": y} for p, x, y in edits]
        )
        result = detect_p3(_whatif_snapshot(moment, players, origin), store.detect_cfg)
        if isinstance(result, Rejection):
            return _error(404, "what-if no longer a P3 moment")
        body = render_png(result, store.image_cfg)
        whatif_images.put(key, body)
        return Response(content=body, media_type="image/png")

    def _kpi_response(stem: str, request: Request) -> Response:
        # format=csv serves the on-disk CSV mirror of the same table
        fmt = request.query_params.get("format", "json")
        if fmt not in ("json", "csv"):
            return _error(422, "format must be json or csv")
        suffix, media = (".csv", "text/csv") if fmt == "csv" else (".json", "application/json")
        return _file_response(
            kpi_dir / f"{stem}{suffix}", request, media, "run `p3 kpi` first"
        )

    @app.get(f"{API_PREFIX}/kpi/players")
    def kpi_players(request: Request):
        group = request.query_params.get("group")
        if group not in ("defender", "midfielder", "u23"):
            return _error(422, "group must be defender, midfielder, or u23")
        return _kpi_response(f"players_{group}", request)

    @app.get(f"{API_PREFIX}/kpi/teams")
    def kpi_teams(request: Request):
        side = request.query_params.get("side")
        if side not in ("attack", "defense"):
            return _error(422, "side must be attack or defense")
        return _kpi_response(f"teams_{side}", request)

    @app.get(f"{API_PREFIX}/model/{{artifact}}")
    def model_artifact(artifact: str, request: Request):
        name = _MODEL_ARTIFACTS.get(artifact)
        if name is None:
            return _error(404, f"unknown artifact {artifact}")
        return _file_response(eval_dir / name, request, "application/json", "run `p3 eval` first")

    return app

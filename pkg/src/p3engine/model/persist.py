"""Model container format (.p3m).

One JSON header line describing the model, then the parameters as a
little-endian float32 payload in header order. Loading checks the
version and the exact payload length, and reproduces predictions
bit-exactly because parameters rest at float32 precision in memory.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from p3engine.errors import ModelFormatError
from p3engine.model.baseline import BaselineModel
from p3engine.model.cnn import CnnModel

FORMAT_VERSION = 1


def save_model(model: BaselineModel | CnnModel, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(model, BaselineModel):
        header: dict = {
            "format": "p3m",
            "version": FORMAT_VERSION,
            "kind": "baseline",
            "seed": model.seed,
            "trained": model.trained,
            "params": [{"name": "weights", "shape": list(model.weights.shape)}, {"name": "bias", "shape": []}],
        }
        arrays = [model.weights, np.array(model.bias)]
    else:
        header = {
            "format": "p3m",
            "version": FORMAT_VERSION,
            "kind": "cnn",
            "seed": model.seed,
            "trained": model.trained,
            "input_shape": list(model.input_shape),
            "arch": list(model.arch),
            "params": [{"name": k, "shape": list(v.shape)} for k, v in model.params.items()],
        }
        arrays = list(model.params.values())
    payload = b"".join(np.asarray(a, dtype="<f4").tobytes() for a in arrays)
    header["payload_floats"] = sum(np.asarray(a).size for a in arrays)
    with path.open("wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload)


def load_model(path: Path) -> BaselineModel | CnnModel:
    path = Path(path)
    data = path.read_bytes()
    newline = data.find(b"\n")
    if newline < 0:
        raise ModelFormatError(f"{path}: missing header line")
    try:
        header = json.loads(data[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: malformed header: {exc}") from exc
    if header.get("format") != "p3m":
        raise ModelFormatError(f"{path}: not a p3m file")
    if header.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {header.get('version')}")
    payload = data[newline + 1 :]
    expected = header.get("payload_floats", 0) * 4
    if len(payload) != expected:
        raise ModelFormatError(f"{path}: truncated payload ({len(payload)} bytes, want {expected})")
    floats = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for spec in header["params"]:
        size = int(np.prod(spec["shape"])) if spec["shape"] else 1
        arrays[spec["name"]] = floats[offset : offset + size].reshape(spec["shape"])
        offset += size
    if header["kind"] == "baseline":
        model = BaselineModel(
            weights=arrays["weights"],
            bias=float(arrays["bias"]),
            seed=header["seed"],
            trained=header.get("trained", True),
        )
        return model
    if header["kind"] == "cnn":
        return CnnModel(
            arch=tuple(header["arch"]),
            params=arrays,
            seed=header["seed"],
            input_shape=tuple(header["input_shape"]),
            trained=header.get("trained", True),
        )
    raise ModelFormatError(f"{path}: unknown model kind {header['kind']!r}")

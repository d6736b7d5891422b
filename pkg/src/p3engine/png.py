"""Minimal deterministic PNG codec for 8-bit RGB images.

Fixed encoder settings (filter type 0 on every scanline, zlib level 9)
keep the output byte-stable across runs, which the pipeline relies on
for reproducibility checks. The decoder handles exactly what the
encoder emits.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _chunk(kind: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(kind)
    crc = zlib.crc32(payload, crc)
    return struct.pack(">I", len(payload)) + kind + payload + struct.pack(">I", crc)


def encode_png(pixels: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as a PNG byte string."""
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise ValueError("expected an (H, W, 3) uint8 array")
    height, width = pixels.shape[:2]
    raw = bytearray()
    for row in range(height):
        raw.append(0)  # filter type 0: None
        raw.extend(pixels[row].tobytes())
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"".join(
        [
            _SIGNATURE,
            _chunk(b"IHDR", header),
            _chunk(b"IDAT", zlib.compress(bytes(raw), 9)),
            _chunk(b"IEND", b""),
        ]
    )


def decode_png(data: bytes) -> np.ndarray:
    """Decode a PNG produced by encode_png back to (H, W, 3) uint8."""
    if data[:8] != _SIGNATURE:
        raise ValueError("not a PNG stream")
    pos = 8
    width = height = 0
    idat = bytearray()
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        kind = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if kind == b"IHDR":
            width, height, depth, color = struct.unpack(">IIBB", payload[:10])
            if depth != 8 or color != 2:
                raise ValueError("only 8-bit RGB PNGs are supported")
        elif kind == b"IDAT":
            idat.extend(payload)
        elif kind == b"IEND":
            break
    raw = zlib.decompress(bytes(idat))
    stride = width * 3
    out = np.empty((height, width, 3), dtype=np.uint8)
    for row in range(height):
        offset = row * (stride + 1)
        if raw[offset] != 0:
            raise ValueError(f"unsupported scanline filter {raw[offset]}")
        out[row] = np.frombuffer(raw[offset + 1 : offset + 1 + stride], dtype=np.uint8).reshape(
            width, 3
        )
    return out

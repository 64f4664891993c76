"""Binary checkpoint format for model weights.

Layout: magic "SSCP", u32 version, u32 header length, JSON header (UTF-8,
sorted keys), then for each parameter named in header["params"]: u32 ndim,
u32 per dimension, and the float64 little-endian row-major payload.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SSCP"
VERSION = 1


def save_checkpoint(path: str | Path, meta: dict, params: dict) -> None:
    """Write weights with their metadata; parameter order is sorted by name."""
    names = sorted(params)
    header = dict(meta)
    header["params"] = names
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")

    chunks = [MAGIC, struct.pack("<II", VERSION, len(header_bytes)), header_bytes]
    for name in names:
        value = np.ascontiguousarray(params[name].value, dtype="<f8")
        chunks.append(struct.pack("<I", value.ndim))
        chunks.append(struct.pack(f"<{value.ndim}I", *value.shape))
        chunks.append(value.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def load_checkpoint(path: str | Path):
    """Read a checkpoint; returns (meta, {name: ndarray})."""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError("not a checkpoint file")
    version, header_len = struct.unpack("<II", data[4:12])
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    header = json.loads(data[12 : 12 + header_len].decode("utf-8"))

    arrays = {}
    pos = 12 + header_len
    for name in header["params"]:
        (ndim,) = struct.unpack("<I", data[pos : pos + 4])
        pos += 4
        shape = struct.unpack(f"<{ndim}I", data[pos : pos + 4 * ndim])
        pos += 4 * ndim
        count = int(np.prod(shape)) if ndim else 1
        arr = np.frombuffer(data[pos : pos + 8 * count], dtype="<f8").reshape(shape)
        pos += 8 * count
        arrays[name] = arr.astype(np.float64)
    meta = {k: v for k, v in header.items() if k != "params"}
    return meta, arrays

"""Sequence embedding file format and its sidecar index.

One file holds one sample's embedding matrix: magic "SBEM", u32 version,
u32 rows, u32 dim, u8 source tag (1 audio, 2 text), then rows x dim float32
little-endian row-major. A directory of embeddings carries an index.csv with
columns sample_id,source,path,rows,dim,valid where path is relative to the
index and valid counts the genuine rows before any padding.
"""

from __future__ import annotations

import csv
import io
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SBEM"
VERSION = 1
SOURCE_AUDIO = 1
SOURCE_TEXT = 2
_SOURCE_NAMES = {SOURCE_AUDIO: "audio", SOURCE_TEXT: "text"}
_SOURCE_TAGS = {v: k for k, v in _SOURCE_NAMES.items()}

INDEX_COLUMNS = ("sample_id", "source", "path", "rows", "dim", "valid")


def source_name(tag: int) -> str:
    if tag not in _SOURCE_NAMES:
        raise ValueError(f"unknown source tag {tag}")
    return _SOURCE_NAMES[tag]


def source_tag(name: str) -> int:
    if name not in _SOURCE_TAGS:
        raise ValueError(f"unknown source name {name!r}")
    return _SOURCE_TAGS[name]


def write_embedding(path: str | Path, arr: np.ndarray, source: int) -> None:
    arr = np.asarray(arr, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("embedding must be a 2-D matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError("embedding must be finite")
    source_name(source)  # validates the tag
    rows, dim = arr.shape
    header = MAGIC + struct.pack("<IIIB", VERSION, rows, dim, source)
    Path(path).write_bytes(header + np.ascontiguousarray(arr).tobytes())


def read_embedding(path: str | Path):
    """Returns (matrix [rows, dim] float32, source tag)."""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError("not an embedding file")
    if len(data) < 17:
        raise ValueError("truncated embedding header")
    version, rows, dim, source = struct.unpack("<IIIB", data[4:17])
    if version != VERSION:
        raise ValueError(f"unsupported embedding version {version}")
    source_name(source)
    need = 17 + 4 * rows * dim
    if len(data) < need:
        raise ValueError("truncated embedding payload")
    arr = np.frombuffer(data[17:need], dtype="<f4").reshape(rows, dim)
    return arr.copy(), source


def write_index(path: str | Path, entries: list) -> None:
    """entries is a list of dicts with the INDEX_COLUMNS keys."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(INDEX_COLUMNS)
    for e in entries:
        writer.writerow([e[c] for c in INDEX_COLUMNS])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_index(path: str | Path) -> list:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or tuple(reader.fieldnames) != INDEX_COLUMNS:
        raise ValueError(f"embedding index must have columns {','.join(INDEX_COLUMNS)}")
    out = []
    for row in reader:
        entry = dict(row)
        entry["rows"] = int(row["rows"])
        entry["dim"] = int(row["dim"])
        entry["valid"] = int(row["valid"])
        if not 0 <= entry["valid"] <= entry["rows"]:
            raise ValueError(f"invalid valid count for {row['sample_id']}")
        source_tag(entry["source"])
        out.append(entry)
    return out


def load_valid_sequence(entry: dict, base_dir: str | Path) -> np.ndarray:
    """Read the embedding an index entry points to, keep its valid rows, and
    promote to float64 for the models."""
    arr, tag = read_embedding(Path(base_dir) / entry["path"])
    if source_name(tag) != entry["source"]:
        raise ValueError(f"source mismatch for {entry['sample_id']}")
    if arr.shape != (entry["rows"], entry["dim"]):
        raise ValueError(f"shape mismatch for {entry['sample_id']}")
    if entry["valid"] == 0:
        raise ValueError(f"no valid rows for {entry['sample_id']}")
    return arr[: entry["valid"]].astype(np.float64)

"""Shared embedding file format: magic SBEM, version, rows, dim, source tag,
then rows x dim little-endian float32, row-major. A directory of files gets
an index.csv (sample_id,source,path,rows,dim,valid) with paths relative to
the index. Writes are atomic (temp file + rename)."""

from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"SBEM"
VERSION = 1
SOURCE_AUDIO = 1
SOURCE_TEXT = 2
SOURCE_NAMES = {SOURCE_AUDIO: "audio", SOURCE_TEXT: "text"}
INDEX_COLUMNS = ("sample_id", "source", "path", "rows", "dim", "valid")


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_sbem(path: str | Path, arr: np.ndarray, source: int) -> None:
    arr = np.asarray(arr, dtype="<f4")
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("embedding must be a 2-D matrix with at least one row")
    if not np.all(np.isfinite(arr)):
        raise ValueError("embedding must be finite")
    if source not in SOURCE_NAMES:
        raise ValueError(f"unknown source tag {source}")
    rows, dim = arr.shape
    header = MAGIC + struct.pack("<IIIB", VERSION, rows, dim, source)
    _atomic_write(Path(path), header + np.ascontiguousarray(arr).tobytes())


def read_sbem(path: str | Path):
    data = Path(path).read_bytes()
    if data[:4] != MAGIC or len(data) < 17:
        raise ValueError(f"{path}: not an embedding file")
    version, rows, dim, source = struct.unpack("<IIIB", data[4:17])
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    need = 17 + 4 * rows * dim
    if len(data) < need:
        raise ValueError(f"{path}: truncated payload")
    return np.frombuffer(data[17:need], dtype="<f4").reshape(rows, dim).copy(), source


def write_index(path: str | Path, entries: list) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(INDEX_COLUMNS)
    for e in entries:
        writer.writerow([e[c] for c in INDEX_COLUMNS])
    _atomic_write(Path(path), buf.getvalue().encode("utf-8"))

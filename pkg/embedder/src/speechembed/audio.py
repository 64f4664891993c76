"""Minimal WAV reading, resampling, and fixed-length segmentation.

Self-contained on purpose: this package talks to the screening pipeline
through files only, so it carries its own small audio layer.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import AudioReadError

TARGET_RATE = 16000
SEGMENT_SECONDS = 10.0


def load_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Mono float samples in [-1, 1] plus the file's sample rate.

    Accepts PCM16 and float32, mono or stereo (stereo is averaged down).
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise AudioReadError(f"cannot read {path}: {exc}") from exc
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioReadError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        size = struct.unpack("<I", data[pos + 4 : pos + 8])[0]
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise AudioReadError(f"{path}: truncated {cid!r} chunk")
        if cid == b"fmt ":
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif cid == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word aligned

    if fmt is None or payload is None:
        raise AudioReadError(f"{path}: missing fmt or data chunk")
    code, channels, rate, _, _, bits = fmt
    if channels not in (1, 2):
        raise AudioReadError(f"{path}: unsupported channel count {channels}")
    if code == 1 and bits == 16:
        x = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif code == 3 and bits == 32:
        x = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise AudioReadError(f"{path}: unsupported encoding (format {code}, {bits} bits)")
    if channels == 2:
        if len(x) % 2:
            raise AudioReadError(f"{path}: odd sample count for stereo data")
        x = x.reshape(-1, 2).mean(axis=1)
    if len(x) == 0:
        raise AudioReadError(f"{path}: no samples")
    if not np.all(np.isfinite(x)):
        raise AudioReadError(f"{path}: non-finite samples")
    return np.clip(x, -1.0, 1.0), rate


def resample(x: np.ndarray, rate_in: int, rate_out: int = TARGET_RATE) -> np.ndarray:
    """Windowed-sinc rate conversion (8 taps per side, Kaiser beta 8.6)."""
    if rate_in == rate_out:
        return x.copy()
    ratio = rate_out / rate_in
    out_len = int(round(len(x) * ratio))
    cutoff = min(1.0, ratio)
    beta = 8.6
    denom = np.i0(beta)
    pos = np.arange(out_len) / ratio
    base = np.floor(pos).astype(int)
    frac = pos - base
    out = np.zeros(out_len)
    for k in range(-7, 9):
        u = k - frac
        taper = np.where(
            np.abs(u / 8.0) <= 1.0,
            np.i0(beta * np.sqrt(np.maximum(0.0, 1.0 - (u / 8.0) ** 2))) / denom,
            0.0,
        )
        w = cutoff * np.sinc(cutoff * u) * taper
        idx = base + k
        valid = (idx >= 0) & (idx < len(x))
        out += np.where(valid, w * np.where(valid, x[np.clip(idx, 0, len(x) - 1)], 0.0), 0.0)
    # normalize against the kernel's DC gain at each fractional phase
    gain = np.zeros(out_len)
    for k in range(-7, 9):
        u = k - frac
        taper = np.where(
            np.abs(u / 8.0) <= 1.0,
            np.i0(beta * np.sqrt(np.maximum(0.0, 1.0 - (u / 8.0) ** 2))) / denom,
            0.0,
        )
        gain += cutoff * np.sinc(cutoff * u) * taper
    out /= np.maximum(gain, 1e-12)
    return np.clip(out, -1.0, 1.0)


def segments(x: np.ndarray, rate: int = TARGET_RATE, seconds: float = SEGMENT_SECONDS):
    """Consecutive fixed-length slices; the final partial slice is kept."""
    step = int(round(seconds * rate))
    return [x[i : i + step] for i in range(0, len(x), step)]

"""Audio ingest: WAV loading, resampling, segmentation, framing, voicing and pauses.

All signals are mono float64 arrays in [-1, 1]. The canonical internal rate is
16 kHz; analysis frames are 16 ms windows advanced by 8 ms.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AudioFormatError, EmptyInputError, TooShortError, UnsupportedCodecError

CANONICAL_RATE = 16000

PAUSE_SHORT = "short"
PAUSE_MEDIUM = "medium"
PAUSE_LONG = "long"
PAUSE_CLASSES = (PAUSE_SHORT, PAUSE_MEDIUM, PAUSE_LONG)


@dataclass
class AudioBuffer:
    """Mono PCM signal with its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("AudioBuffer samples must be one-dimensional")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("AudioBuffer samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        self.sample_rate = int(self.sample_rate)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate


@dataclass
class FrameSequence:
    """Fixed-length analysis windows taken every ``hop`` samples."""

    frames: np.ndarray  # [n_frames, window_len], copied from the source signal
    window_len: int
    hop: int
    sample_rate: int

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def hop_seconds(self) -> float:
        return self.hop / self.sample_rate

    @property
    def window_seconds(self) -> float:
        return self.window_len / self.sample_rate

    @property
    def origin_times(self) -> np.ndarray:
        """Start time of each frame in seconds; frame i starts at i * hop."""
        return np.arange(self.n_frames) * self.hop / self.sample_rate

    @property
    def span_seconds(self) -> float:
        """Total time covered from the first frame start to the last frame end."""
        return ((self.n_frames - 1) * self.hop + self.window_len) / self.sample_rate


# A voicing mask is a boolean array parallel to a FrameSequence.
VoicingMask = np.ndarray


@dataclass
class Pause:
    start_s: float
    end_s: float
    label: str

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass
class PauseList:
    pauses: list
    total_speech_s: float
    total_audio_s: float

    def count(self, label: str) -> int:
        return sum(1 for p in self.pauses if p.label == label)


def _read_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise AudioFormatError("truncated chunk " + cid.decode("latin1"))
        yield cid, body
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def load_wav(path: str | Path) -> AudioBuffer:
    """Load a RIFF/WAVE file (PCM16 or float32, mono or stereo).

    Stereo is downmixed by per-sample channel mean; 16-bit samples are scaled
    to [-1, 1] by 1/32768.
    """
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise AudioFormatError("file too small to be a WAV container")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioFormatError("not a RIFF/WAVE file")

    fmt = None
    payload = None
    for cid, body in _read_chunks(data):
        if cid == b"fmt " and fmt is None:
            if len(body) < 16:
                raise AudioFormatError("fmt chunk too small")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif cid == b"data" and payload is None:
            payload = body
    if fmt is None or payload is None:
        raise AudioFormatError("missing fmt or data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if sample_rate <= 0:
        raise AudioFormatError("non-positive sample rate in header")
    if n_channels not in (1, 2):
        raise UnsupportedCodecError(f"unsupported channel count {n_channels}")
    if audio_format == 1 and bits == 16:
        raw = np.frombuffer(payload[: len(payload) // 2 * 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        raw = np.frombuffer(payload[: len(payload) // 4 * 4], dtype="<f4")
        if not np.all(np.isfinite(raw)):
            raise AudioFormatError("non-finite float samples")
        samples = np.clip(raw.astype(np.float64), -1.0, 1.0)
    else:
        raise UnsupportedCodecError(f"unsupported encoding (format={audio_format}, bits={bits})")

    if n_channels == 2:
        usable = len(samples) // 2 * 2
        samples = samples[:usable].reshape(-1, 2).mean(axis=1)
    return AudioBuffer(samples, sample_rate)


def write_wav(path: str | Path, buf: AudioBuffer, encoding: str = "pcm16") -> None:
    """Write a mono WAV file; ``encoding`` is 'pcm16' or 'float32'."""
    if encoding == "pcm16":
        fmt_code, bits = 1, 16
        scaled = np.clip(np.round(buf.samples * 32767.0), -32768, 32767)
        payload = scaled.astype("<i2").tobytes()
    elif encoding == "float32":
        fmt_code, bits = 3, 32
        payload = buf.samples.astype("<f4").tobytes()
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    block_align = bits // 8
    byte_rate = buf.sample_rate * block_align
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        fmt_code,
        1,
        buf.sample_rate,
        byte_rate,
        block_align,
        bits,
        b"data",
        len(payload),
    )
    Path(path).write_bytes(header + payload)


def _kaiser_window(x: np.ndarray, beta: float = 8.6) -> np.ndarray:
    # continuous Kaiser window on [-1, 1], zero outside
    inside = np.abs(x) <= 1.0
    arg = np.zeros_like(x)
    arg[inside] = beta * np.sqrt(1.0 - x[inside] ** 2)
    return np.where(inside, np.i0(arg) / np.i0(beta), 0.0)


def resample(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Windowed-sinc resampling with 16 taps per output sample.

    The low-pass cutoff tracks the output Nyquist when downsampling. Identity
    (bitwise) when rates already match.
    """
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == buf.sample_rate:
        return AudioBuffer(buf.samples.copy(), buf.sample_rate)
    n_in = len(buf)
    ratio = target_rate / buf.sample_rate
    n_out = int(round(n_in * ratio))
    if n_out == 0:
        return AudioBuffer(np.zeros(0), target_rate)

    t = np.arange(n_out) / ratio  # output instants in input-sample units
    base = np.floor(t).astype(np.int64)
    taps = np.arange(-7, 9)
    idx = base[:, None] + taps[None, :]
    u = t[:, None] - idx
    cutoff = min(1.0, ratio)
    kernel = cutoff * np.sinc(cutoff * u) * _kaiser_window(u / 8.0)
    kernel /= kernel.sum(axis=1, keepdims=True)

    valid = (idx >= 0) & (idx < n_in)
    gathered = np.where(valid, buf.samples[np.clip(idx, 0, n_in - 1)], 0.0)
    out = (kernel * gathered).sum(axis=1)
    return AudioBuffer(np.clip(out, -1.0, 1.0), target_rate)


def segment(buf: AudioBuffer, seg_seconds: float = 10.0, min_tail_seconds: float = 2.0) -> list:
    """Split into consecutive fixed-length segments.

    The final partial segment is kept only when it is at least
    ``min_tail_seconds`` long; shorter tails are dropped.
    """
    if len(buf) == 0:
        raise EmptyInputError("cannot segment an empty buffer")
    seg_len = int(round(seg_seconds * buf.sample_rate))
    min_tail = int(round(min_tail_seconds * buf.sample_rate))
    out = []
    pos = 0
    while pos + seg_len <= len(buf):
        out.append(AudioBuffer(buf.samples[pos : pos + seg_len].copy(), buf.sample_rate))
        pos += seg_len
    tail = len(buf) - pos
    if tail >= min_tail:
        out.append(AudioBuffer(buf.samples[pos:].copy(), buf.sample_rate))
    return out


def frame(buf: AudioBuffer, window_seconds: float = 0.016, hop_seconds: float = 0.008) -> FrameSequence:
    """Slice into fixed windows; frame i starts at sample i * hop."""
    window_len = int(round(window_seconds * buf.sample_rate))
    hop = int(round(hop_seconds * buf.sample_rate))
    if len(buf) < window_len:
        raise TooShortError(f"need at least {window_len} samples, got {len(buf)}")
    n = (len(buf) - window_len) // hop + 1
    idx = np.arange(window_len)[None, :] + hop * np.arange(n)[:, None]
    return FrameSequence(buf.samples[idx], window_len, hop, buf.sample_rate)


def frame_zcr(frames: FrameSequence) -> np.ndarray:
    """Per-frame zero-crossing rate: sign changes per sample transition.

    Zero counts as positive; the denominator is window_len - 1.
    """
    signs = np.where(frames.frames >= 0.0, 1, -1)
    crossings = (signs[:, 1:] != signs[:, :-1]).sum(axis=1)
    return crossings / (frames.window_len - 1)


def frame_rms(frames: FrameSequence) -> np.ndarray:
    return np.sqrt(np.mean(frames.frames**2, axis=1))


def detect_voiced(
    frames: FrameSequence,
    energy_threshold: float = 0.02,
    zcr_threshold: float = 0.25,
) -> VoicingMask:
    """Dual-threshold voicing: a frame is voiced when its RMS is at least
    ``energy_threshold`` and its zero-crossing rate is at most ``zcr_threshold``."""
    if frames.n_frames == 0:
        raise EmptyInputError("empty frame sequence")
    return (frame_rms(frames) >= energy_threshold) & (frame_zcr(frames) <= zcr_threshold)


def _classify_pause(duration_s: float) -> str:
    if duration_s < 1.0:
        return PAUSE_SHORT
    if duration_s <= 2.0:  # 1 s and 2 s both fall in the middle bin
        return PAUSE_MEDIUM
    return PAUSE_LONG


def detect_pauses(
    mask: VoicingMask,
    frames: FrameSequence,
    min_pause_seconds: float = 0.25,
) -> PauseList:
    """Turn maximal unvoiced runs of at least ``min_pause_seconds`` into pauses.

    Pause duration is run length times the hop; total speech time is total
    audio time minus the summed pause durations.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape[0] != frames.n_frames:
        raise ValueError("mask and frames must be parallel")
    hop_s = frames.hop_seconds
    total_audio_s = frames.span_seconds

    pauses = []
    i = 0
    n = mask.shape[0]
    while i < n:
        if mask[i]:
            i += 1
            continue
        j = i
        while j < n and not mask[j]:
            j += 1
        duration = (j - i) * hop_s
        if duration >= min_pause_seconds:
            start = i * hop_s
            pauses.append(Pause(start, start + duration, _classify_pause(duration)))
        i = j
    total_pause = sum(p.duration_s for p in pauses)
    return PauseList(pauses, total_audio_s - total_pause, total_audio_s)

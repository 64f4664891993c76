"""Hand-crafted acoustic features.

Everything operates on 16 kHz mono signals framed into 16 ms windows with an
8 ms hop. Sample-level features are means over frames; measures that need
voiced speech fall back to an imputed default plus an ``absent_*`` flag when
no usable frames exist.
"""

from __future__ import annotations

import numpy as np

from . import audio as au
from .config import Config
from .errors import EmptyInputError

# Field order is frozen: extract_acoustic returns these keys in this order.
ACOUSTIC_FIELDS = (
    tuple(f"mfcc_mean_{i:02d}" for i in range(13))
    + ("mfcc_energy_mean",)
    + tuple(f"mfcc_delta_mean_{i:02d}" for i in range(14))
    + tuple(f"mfcc_delta2_mean_{i:02d}" for i in range(14))
    + (
        "zcr_voiced",
        "f0_mean_hz",
        "f0_sd_hz",
        "hnr_mean_db",
        "jitter_local",
        "shimmer_local",
        "intensity_mean_db",
        "total_audio_s",
        "total_speech_s",
        "pause_count_short",
        "pause_count_medium",
        "pause_count_long",
        "mean_pause_s",
        "pause_to_speech_ratio",
        "phonation_rate",
        "absent_zcr",
        "absent_f0",
        "absent_hnr",
        "absent_jitter",
        "absent_shimmer",
        "ratio_capped",
    )
)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_filters: int, fft_size: int, sample_rate: int, f_lo: float = 0.0, f_hi: float | None = None) -> np.ndarray:
    """Triangular filters spaced evenly on the mel scale.

    Returns [n_filters, fft_size // 2 + 1]; each triangle is evaluated
    continuously at the FFT bin frequencies.
    """
    if f_hi is None:
        f_hi = sample_rate / 2.0
    edges_mel = np.linspace(hz_to_mel(f_lo), hz_to_mel(f_hi), n_filters + 2)
    edges_hz = mel_to_hz(edges_mel)
    bin_freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size

    bank = np.zeros((n_filters, fft_size // 2 + 1))
    for k in range(n_filters):
        lo, mid, hi = edges_hz[k], edges_hz[k + 1], edges_hz[k + 2]
        rising = (bin_freqs - lo) / (mid - lo)
        falling = (hi - bin_freqs) / (hi - mid)
        bank[k] = np.clip(np.minimum(rising, falling), 0.0, None)
    return bank


def dct_matrix(n_out: int, n_in: int) -> np.ndarray:
    """Orthonormal DCT-II basis, rows are coefficients."""
    n = np.arange(n_in)
    k = np.arange(n_out)[:, None]
    mat = np.cos(np.pi * k * (2 * n + 1) / (2 * n_in))
    mat *= np.sqrt(2.0 / n_in)
    mat[0] *= np.sqrt(0.5)
    return mat


def _delta(seq: np.ndarray, reach: int = 2) -> np.ndarray:
    """Regression delta over +-reach frames with edge-clamped indices."""
    n = seq.shape[0]
    denom = 2.0 * sum(k * k for k in range(1, reach + 1))
    out = np.zeros_like(seq)
    for k in range(1, reach + 1):
        fwd = seq[np.minimum(np.arange(n) + k, n - 1)]
        bwd = seq[np.maximum(np.arange(n) - k, 0)]
        out += k * (fwd - bwd)
    return out / denom


def mfcc(frames: au.FrameSequence, cfg: Config) -> np.ndarray:
    """MFCC matrix [n_frames, 42]: 13 cepstra + log energy, then deltas and
    delta-deltas of all 14.

    Hamming window, zero-padded 512-point magnitude spectrum, 26 triangular
    mel filters over 0..Nyquist, log floored at ``cfg.log_floor``, orthonormal
    DCT-II keeping coefficients 0..12.
    """
    x = frames.frames
    win = np.hamming(frames.window_len)
    windowed = x * win[None, :]

    spec = np.abs(np.fft.rfft(windowed, n=cfg.fft_size, axis=1))
    bank = mel_filterbank(cfg.mel_filters, cfg.fft_size, frames.sample_rate)
    mel_energy = spec @ bank.T
    log_mel = np.log(np.maximum(mel_energy, cfg.log_floor))
    cepstra = log_mel @ dct_matrix(cfg.mfcc_coeffs, cfg.mel_filters).T

    energy = np.log(np.maximum((windowed**2).sum(axis=1), cfg.log_floor))
    static = np.concatenate([cepstra, energy[:, None]], axis=1)
    d1 = _delta(static)
    d2 = _delta(d1)
    return np.concatenate([static, d1, d2], axis=1)


def _autocorr_peak(frame: np.ndarray, sample_rate: int, f0_min: float, f0_max: float):
    """Best normalized-autocorrelation lag in the F0 band, or None.

    The correlation is evaluated one lag beyond each band edge so edge peaks
    can be classified; only genuine local maxima inside the band count. Among
    near-best maxima the shortest lag wins, which suppresses the subharmonic
    at twice the period. DC is removed per frame so constant segments have no
    spurious peak.
    """
    x = frame - frame.mean()
    n = x.shape[0]
    lag_min = int(np.floor(sample_rate / f0_max))
    lag_max = int(np.ceil(sample_rate / f0_min))
    lag_max = min(lag_max, n - 2)
    if lag_min < 1 or lag_min > lag_max:
        return None

    e0 = float(x @ x)
    if e0 <= 0.0:
        return None
    lo = max(1, lag_min - 1)
    hi = min(n - 1, lag_max + 1)
    lags = np.arange(lo, hi + 1)
    r = np.empty(lags.shape[0])
    for i, tau in enumerate(lags):
        a = x[: n - tau]
        b = x[tau:]
        denom = np.sqrt(float(a @ a) * float(b @ b))
        r[i] = float(a @ b) / denom if denom > 0.0 else 0.0

    in_band = (lags >= lag_min) & (lags <= lag_max)
    if not in_band.any():
        return None
    r_top = float(r[in_band].max())
    interior = (r[1:-1] >= r[:-2]) & (r[1:-1] >= r[2:])
    peaks_idx = [i for i in np.nonzero(interior)[0] + 1 if in_band[i]]
    candidates = [i for i in peaks_idx if r[i] >= 0.85 * r_top]
    if not candidates:
        return None
    best = min(candidates)

    lag = float(lags[best])
    peak = float(r[best])
    if 0 < best < r.shape[0] - 1:
        y0, y1, y2 = r[best - 1], r[best], r[best + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom < 0.0:  # genuine local maximum
            shift = 0.5 * (y0 - y2) / denom
            if abs(shift) <= 1.0:
                lag += shift
                peak = y1 - 0.25 * (y0 - y2) * shift
    return lag, min(peak, 1.0)


def track_f0(frames: au.FrameSequence, mask: au.VoicingMask, cfg: Config):
    """Per-voiced-frame F0 (Hz) and peak autocorrelation.

    Frames whose interpolated peak falls below ``cfg.f0_reject_corr`` are
    dropped. Returns (f0_values, peak_values) as equal-length arrays.
    """
    f0s, peaks = [], []
    for i in np.nonzero(np.asarray(mask, dtype=bool))[0]:
        hit = _autocorr_peak(frames.frames[i], frames.sample_rate, cfg.f0_min_hz, cfg.f0_max_hz)
        if hit is None:
            continue
        lag, r = hit
        if r < cfg.f0_reject_corr:
            continue
        f0s.append(frames.sample_rate / lag)
        peaks.append(r)
    return np.asarray(f0s), np.asarray(peaks)


def hnr_db(peaks: np.ndarray, cfg: Config) -> np.ndarray:
    """Harmonics-to-noise ratio per frame from the autocorrelation peak r:
    10 log10(r / (1 - r)), clamped to [hnr_min_db, hnr_max_db]."""
    r = np.clip(peaks, 1e-12, 1.0 - 1e-12)
    return np.clip(10.0 * np.log10(r / (1.0 - r)), cfg.hnr_min_db, cfg.hnr_max_db)


def _pick_pitch_marks(x: np.ndarray, t0: float) -> np.ndarray:
    """One mark per expected period: starting from the global extreme, walk
    forward (then backward) choosing the strongest sample in each window of
    [previous mark + 0.5 T0, previous mark + 1.5 T0).

    A walk stops when its best candidate drops to noise level (2% of the
    global peak), so trailing silence or a decaying tail adds no marks.
    """
    n = x.shape[0]
    polarity = 1.0 if float(np.max(x)) >= float(-np.min(x)) else -1.0
    s = polarity * x
    first = int(np.argmax(s))
    floor = 0.02 * s[first]

    marks = [first]
    m = first
    while True:
        lo = int(np.floor(m + 0.5 * t0))
        hi = int(np.floor(m + 1.5 * t0))
        if lo >= n:
            break
        hi = min(hi, n)
        if hi <= lo:
            break
        m = lo + int(np.argmax(s[lo:hi]))
        if s[m] <= floor:
            break
        marks.append(m)
    m = first
    while True:
        hi = int(np.ceil(m - 0.5 * t0)) + 1
        lo = int(np.ceil(m - 1.5 * t0))
        if hi <= 0:
            break
        lo = max(lo, 0)
        if hi <= lo:
            break
        m = lo + int(np.argmax(s[lo:hi]))
        if s[m] <= floor:
            break
        marks.insert(0, m)
    return np.asarray(marks, dtype=np.int64)


def jitter_shimmer(buf: au.AudioBuffer, f0_median_hz: float):
    """Local jitter and shimmer over valid pitch periods.

    Periods are mark-to-mark gaps; a period is valid when it lies within
    [0.7, 1.3] times the expected period. Differences are pooled over maximal
    runs of valid periods. Needs at least 3 consecutive valid periods, else
    returns (None, None). Amplitude is |x| at the mark itself.
    """
    if f0_median_hz <= 0.0:
        return None, None
    t0 = buf.sample_rate / f0_median_hz
    marks = _pick_pitch_marks(buf.samples, t0)
    if marks.shape[0] < 4:
        return None, None

    periods = np.diff(marks).astype(np.float64)
    valid = (periods >= 0.7 * t0) & (periods <= 1.3 * t0)

    # maximal runs of consecutive valid periods
    runs = []
    i = 0
    while i < valid.shape[0]:
        if not valid[i]:
            i += 1
            continue
        j = i
        while j < valid.shape[0] and valid[j]:
            j += 1
        if j - i >= 3:
            runs.append((i, j))
        i = j
    if not runs:
        return None, None

    period_diffs, period_vals = [], []
    amp_diffs, amp_vals = [], []
    for i, j in runs:
        t = periods[i:j]
        period_diffs.append(np.abs(np.diff(t)))
        period_vals.append(t)
        a = np.abs(buf.samples[marks[i : j + 1]])
        amp_diffs.append(np.abs(np.diff(a)))
        amp_vals.append(a)
    mean_t = float(np.concatenate(period_vals).mean())
    mean_a = float(np.concatenate(amp_vals).mean())
    jitter = float(np.concatenate(period_diffs).mean()) / mean_t if mean_t > 0 else None
    shimmer = float(np.concatenate(amp_diffs).mean()) / mean_a if mean_a > 0 else None
    return jitter, shimmer


def intensity_db(frames: au.FrameSequence, cfg: Config) -> np.ndarray:
    """Per-frame intensity 20 log10(RMS / ref), floored at 0 dB."""
    rms = au.frame_rms(frames)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(np.maximum(rms, 1e-300) / cfg.intensity_ref)
    return np.maximum(db, 0.0)


def extract_acoustic(buf: au.AudioBuffer, cfg: Config) -> dict:
    """Full acoustic feature dict (keys = ACOUSTIC_FIELDS, in order)."""
    if len(buf) == 0:
        raise EmptyInputError("empty audio buffer")
    if buf.sample_rate != cfg.sample_rate:
        buf = au.resample(buf, cfg.sample_rate)

    frames = au.frame(buf, cfg.window_seconds, cfg.hop_seconds)
    mask = au.detect_voiced(frames, cfg.energy_threshold, cfg.zcr_threshold)
    out: dict = {}

    coeffs = mfcc(frames, cfg)
    means = coeffs.mean(axis=0)
    for i in range(13):
        out[f"mfcc_mean_{i:02d}"] = float(means[i])
    out["mfcc_energy_mean"] = float(means[13])
    for i in range(14):
        out[f"mfcc_delta_mean_{i:02d}"] = float(means[14 + i])
    for i in range(14):
        out[f"mfcc_delta2_mean_{i:02d}"] = float(means[28 + i])

    n_voiced = int(np.asarray(mask).sum())
    absent_zcr = n_voiced == 0
    out["zcr_voiced"] = float(au.frame_zcr(frames)[mask].mean()) if n_voiced else 0.0

    f0s, peaks = track_f0(frames, mask, cfg)
    absent_f0 = f0s.shape[0] == 0
    out["f0_mean_hz"] = float(f0s.mean()) if not absent_f0 else 0.0
    out["f0_sd_hz"] = float(f0s.std()) if not absent_f0 else 0.0
    absent_hnr = absent_f0
    out["hnr_mean_db"] = float(hnr_db(peaks, cfg).mean()) if not absent_hnr else cfg.hnr_min_db

    jitter = shimmer = None
    if not absent_f0:
        jitter, shimmer = jitter_shimmer(buf, float(np.median(f0s)))
    out["jitter_local"] = float(jitter) if jitter is not None else 0.0
    out["shimmer_local"] = float(shimmer) if shimmer is not None else 0.0

    out["intensity_mean_db"] = float(intensity_db(frames, cfg).mean())

    pl = au.detect_pauses(mask, frames, cfg.min_pause_seconds)
    out["total_audio_s"] = pl.total_audio_s
    out["total_speech_s"] = pl.total_speech_s
    out["pause_count_short"] = float(pl.count(au.PAUSE_SHORT))
    out["pause_count_medium"] = float(pl.count(au.PAUSE_MEDIUM))
    out["pause_count_long"] = float(pl.count(au.PAUSE_LONG))
    durations = [p.duration_s for p in pl.pauses]
    out["mean_pause_s"] = float(np.mean(durations)) if durations else 0.0

    total_pause = pl.total_audio_s - pl.total_speech_s
    capped = False
    if pl.total_speech_s > 1e-9:
        ratio = total_pause / pl.total_speech_s
        if ratio > cfg.pause_ratio_cap:
            ratio, capped = cfg.pause_ratio_cap, True
    else:
        ratio, capped = cfg.pause_ratio_cap, True
    out["pause_to_speech_ratio"] = float(ratio)
    out["phonation_rate"] = float(pl.total_speech_s / pl.total_audio_s) if pl.total_audio_s > 0 else 0.0

    out["absent_zcr"] = float(absent_zcr)
    out["absent_f0"] = float(absent_f0)
    out["absent_hnr"] = float(absent_hnr)
    out["absent_jitter"] = float(jitter is None)
    out["absent_shimmer"] = float(shimmer is None)
    out["ratio_capped"] = float(capped)

    assert tuple(out.keys()) == ACOUSTIC_FIELDS
    return out

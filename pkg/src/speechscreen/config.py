"""Pipeline configuration.

All tunable defaults live in one flat dataclass. Values can be overridden by a
flat key-value text file (``key = value`` per line, ``#`` comments) and again
by CLI flags, in that order of precedence.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError


@dataclass
class Config:
    # audio ingest
    sample_rate: int = 16000
    segment_seconds: float = 10.0
    min_tail_seconds: float = 2.0
    energy_threshold: float = 0.02
    zcr_threshold: float = 0.25
    min_pause_seconds: float = 0.25

    # acoustic features
    window_seconds: float = 0.016
    hop_seconds: float = 0.008
    fft_size: int = 512
    mel_filters: int = 26
    mfcc_coeffs: int = 13
    log_floor: float = 1e-10
    f0_min_hz: float = 75.0
    f0_max_hz: float = 500.0
    f0_reject_corr: float = 0.5
    hnr_min_db: float = -20.0
    hnr_max_db: float = 40.0
    intensity_ref: float = 1e-5
    pause_ratio_cap: float = 10.0

    # linguistic features
    mattr_window: int = 50
    coherence_threshold: float = 0.3
    vad_lexicon_path: str = ""  # empty selects the packaged 50-word lexicon
    filled_pauses: str = "um,uh,er,ah,hmm,mm"
    subordinators: str = "because,although,while,since,that,which,who,if,when"

    # labels and folds
    diagnosis_cutoff: int = 10
    folds: int = 5

    # models and training
    dropout: float = 0.2
    leaky_slope: float = 0.01
    bilstm_hidden: int = 128
    attention_heads: int = 2
    baseline_lr: float = 3e-4
    baseline_batch: int = 8
    baseline_epochs: int = 10
    fusion_lr: float = 3e-5
    fusion_batch: int = 4
    fusion_epochs: int = 10
    adamw_beta1: float = 0.9
    adamw_beta2: float = 0.999
    adamw_eps: float = 1e-8
    weight_decay: float = 0.01
    decision_threshold: float = 0.5
    standardize_features: bool = True
    max_seq_frames: int = 4096


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(Config)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines into a typed override dict."""
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        overrides[key] = _coerce(key, value)
    return overrides


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> Config:
    """Build a Config from defaults, an optional file, and optional overrides."""
    cfg = Config()
    if path is not None:
        cfg = apply_overrides(cfg, parse_config_text(Path(path).read_text(encoding="utf-8")))
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def apply_overrides(cfg: Config, overrides: dict) -> Config:
    unknown = set(overrides) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return dataclasses.replace(cfg, **overrides)


def config_as_text(cfg: Config) -> str:
    """Serialize a Config back to the flat file format (stable key order)."""
    lines = [f"{f.name} = {getattr(cfg, f.name)}" for f in dataclasses.fields(Config)]
    return "\n".join(lines) + "\n"


def split_words(csv_list: str) -> tuple[str, ...]:
    """Split a comma-separated config value into a tuple of lowercased words."""
    return tuple(w.strip().lower() for w in csv_list.split(",") if w.strip())

"""Frozen deterministic encoders.

Both encoders are pure functions of (model id, input): the id seeds every
weight, nothing is ever updated, and repeated calls produce identical bytes.
They stand behind the same interface a real pretrained encoder would, so one
can be swapped in without touching the file format or the CLI.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .audio import SEGMENT_SECONDS, TARGET_RATE, segments
from .errors import AudioReadError
from .tokenizer import SEQUENCE_LEN, Tokenizer

AUDIO_WINDOW = 400  # 25 ms at 16 kHz
AUDIO_STRIDE = 320  # 20 ms at 16 kHz, so a 10 s segment yields 499 frames
DEFAULT_DIM = 768
_HIDDEN = 64


def _model_seed(kind: str, model_id: str) -> int:
    digest = hashlib.sha256(f"{kind}:{model_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def _uniform(rng, fan_in, shape):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class AudioEncoder:
    """Strided frame encoder: each 25 ms window becomes one hidden vector."""

    def __init__(self, model_id: str = "frozen-speech-v1", dim: int = DEFAULT_DIM):
        self.model_id = model_id
        self.dim = dim
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([_model_seed("audio", model_id)])))
        self.w1 = _uniform(rng, AUDIO_WINDOW, (AUDIO_WINDOW, _HIDDEN))
        self.b1 = _uniform(rng, AUDIO_WINDOW, _HIDDEN)
        self.w2 = _uniform(rng, _HIDDEN, (_HIDDEN, dim))
        self.b2 = _uniform(rng, _HIDDEN, dim)

    def frames_for(self, n_samples: int) -> int:
        if n_samples < AUDIO_WINDOW:
            return 0
        return (n_samples - AUDIO_WINDOW) // AUDIO_STRIDE + 1

    def encode_segment(self, x: np.ndarray) -> np.ndarray:
        n = self.frames_for(len(x))
        if n == 0:
            return np.zeros((0, self.dim), dtype=np.float32)
        idx = np.arange(AUDIO_WINDOW)[None, :] + AUDIO_STRIDE * np.arange(n)[:, None]
        frames = x[idx]
        h = np.tanh(frames @ self.w1 + self.b1)
        y = np.tanh(h @ self.w2 + self.b2)
        return y.astype(np.float32)

    def encode(self, x: np.ndarray, rate: int = TARGET_RATE) -> np.ndarray:
        """Hidden states for consecutive 10 s segments, concatenated in order."""
        parts = [self.encode_segment(seg) for seg in segments(x, rate, SEGMENT_SECONDS)]
        parts = [p for p in parts if len(p)]
        if not parts:
            raise AudioReadError(
                f"audio too short: need at least {AUDIO_WINDOW} samples at {TARGET_RATE} Hz"
            )
        return np.concatenate(parts, axis=0)


class TextEncoder:
    """Per-token hidden states from seeded token and position tables."""

    def __init__(self, model_id: str = "frozen-text-v1", dim: int = DEFAULT_DIM,
                 tokenizer: Tokenizer | None = None):
        self.model_id = model_id
        self.dim = dim
        self.tokenizer = tokenizer if tokenizer is not None else Tokenizer()
        self._seed = _model_seed("text", model_id)
        self._token_cache: dict = {}
        pos_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self._seed, 2])))
        self._positions = pos_rng.uniform(-1.0, 1.0, size=(SEQUENCE_LEN, dim))

    def _token_vector(self, token_id: int) -> np.ndarray:
        vec = self._token_cache.get(token_id)
        if vec is None:
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self._seed, 1, token_id])))
            vec = rng.uniform(-1.0, 1.0, size=self.dim)
            self._token_cache[token_id] = vec
        return vec

    def encode(self, text: str):
        """([SEQUENCE_LEN, dim] float32 hidden states, valid token count)."""
        ids, valid = self.tokenizer.encode(text)
        table = np.stack([self._token_vector(i) for i in ids])
        out = np.tanh(table + self._positions)
        return out.astype(np.float32), valid

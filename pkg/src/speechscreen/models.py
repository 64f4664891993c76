"""Classifier architectures built from the neural core.

Two model kinds:

* baseline: five linear layers over the hand-crafted feature vector, each
  hidden width half (rounded up) of the previous, LeakyReLU plus dropout
  between layers, one output logit.
* fusion: an audio-embedding branch and a text-embedding branch (two-layer
  bidirectional LSTM, multi-head self-attention, mean pool) concatenated with
  the hand-crafted vector, then a two-layer head producing one logit.
"""

from __future__ import annotations

import math

import numpy as np

from .config import Config
from .errors import ConfigError
from .nn import (
    BiLSTM,
    Dropout,
    Linear,
    MultiHeadAttention,
    bce_with_logits,
    leaky_relu,
    leaky_relu_backward,
    load_checkpoint,
    masked_mean_pool,
    masked_mean_pool_backward,
    save_checkpoint,
)

MIN_BASELINE_INPUT = 16


class BaselineClassifier:
    kind = "baseline"

    def __init__(self, input_dim: int, cfg: Config, rng: np.random.Generator):
        if input_dim < MIN_BASELINE_INPUT:
            raise ConfigError(
                f"baseline needs at least {MIN_BASELINE_INPUT} input features, got {input_dim}"
            )
        self.input_dim = input_dim
        self.slope = cfg.leaky_slope
        dims = [input_dim]
        for _ in range(4):
            dims.append(math.ceil(dims[-1] / 2))
        self.hidden_dims = dims[1:]
        self.linears = []
        for i in range(4):
            self.linears.append(Linear(dims[i], dims[i + 1], rng))
        self.out = Linear(dims[4], 1, rng)
        self.dropout = Dropout(cfg.dropout)

    def forward(self, x: np.ndarray, rng: np.random.Generator | None = None, training: bool = False):
        """x is [batch, input_dim]; returns (logits [batch], cache)."""
        caches = []
        h = x
        for lin in self.linears:
            h, c_lin = lin.forward(h)
            h, c_act = leaky_relu(h, self.slope)
            h, c_drop = self.dropout.forward(h, rng, training)
            caches.append((c_lin, c_act, c_drop))
        logits, c_out = self.out.forward(h)
        return logits[:, 0], (caches, c_out)

    def backward(self, cache, dlogits: np.ndarray):
        caches, c_out = cache
        dh = self.out.backward(c_out, dlogits[:, None])
        for lin, (c_lin, c_act, c_drop) in zip(reversed(self.linears), reversed(caches)):
            dh = self.dropout.backward(c_drop, dh)
            dh = leaky_relu_backward(c_act, dh)
            dh = lin.backward(c_lin, dh)
        return dh

    def parameters(self) -> dict:
        out = {}
        for i, lin in enumerate(self.linears):
            for k, p in lin.parameters().items():
                out[f"fc{i}.{k}"] = p
        for k, p in self.out.parameters().items():
            out[f"out.{k}"] = p
        return out

    def arch(self) -> dict:
        return {"kind": self.kind, "input_dim": self.input_dim}


class _SequenceBranch:
    """BiLSTM stack, self-attention, mean pool: [T, d_in] -> [embed_dim]."""

    def __init__(self, input_dim: int, hidden: int, layers: int, heads: int, rng: np.random.Generator):
        self.lstm = BiLSTM(input_dim, hidden, layers, rng)
        self.attn = MultiHeadAttention(self.lstm.output_dim, heads, rng)
        self.output_dim = self.lstm.output_dim

    def forward(self, seq: np.ndarray):
        h, c_lstm = self.lstm.forward(seq)
        a, c_attn = self.attn.forward(h)
        pooled, c_pool = masked_mean_pool(a)
        return pooled, (c_lstm, c_attn, c_pool)

    def backward(self, cache, d_pooled: np.ndarray):
        c_lstm, c_attn, c_pool = cache
        da = masked_mean_pool_backward(c_pool, d_pooled)
        dh = self.attn.backward(c_attn, da)
        return self.lstm.backward(c_lstm, dh)

    def parameters(self) -> dict:
        out = {}
        for k, p in self.lstm.parameters().items():
            out[f"lstm.{k}"] = p
        for k, p in self.attn.parameters().items():
            out[f"attn.{k}"] = p
        return out


class FusionClassifier:
    kind = "fusion"

    def __init__(
        self,
        audio_dim: int,
        text_dim: int,
        hand_dim: int,
        cfg: Config,
        rng: np.random.Generator,
        lstm_layers: int = 2,
    ):
        self.audio_dim = audio_dim
        self.text_dim = text_dim
        self.hand_dim = hand_dim
        self.hidden = cfg.bilstm_hidden
        self.heads = cfg.attention_heads
        self.lstm_layers = lstm_layers
        self.slope = cfg.leaky_slope
        self.max_seq = cfg.max_seq_frames

        self.audio_branch = _SequenceBranch(audio_dim, self.hidden, lstm_layers, self.heads, rng)
        self.text_branch = _SequenceBranch(text_dim, self.hidden, lstm_layers, self.heads, rng)
        concat_dim = self.audio_branch.output_dim + self.text_branch.output_dim + hand_dim
        mid = math.ceil(concat_dim / 2)
        self.fc = Linear(concat_dim, mid, rng)
        self.out = Linear(mid, 1, rng)
        self.dropout = Dropout(cfg.dropout)
        self.concat_dim = concat_dim

    def forward_sample(
        self,
        audio_seq: np.ndarray,
        text_seq: np.ndarray,
        hand: np.ndarray,
        rng: np.random.Generator | None = None,
        training: bool = False,
    ):
        """One sample: audio_seq [Ta, audio_dim], text_seq [Tt, text_dim],
        hand [hand_dim]. Returns (logit, cache)."""
        audio_seq = audio_seq[: self.max_seq]
        text_seq = text_seq[: self.max_seq]
        r1, c_a = self.audio_branch.forward(audio_seq)
        r2, c_t = self.text_branch.forward(text_seq)
        z = np.concatenate([r1, r2, hand])
        h, c_fc = self.fc.forward(z)
        h, c_act = leaky_relu(h, self.slope)
        h, c_drop = self.dropout.forward(h, rng, training)
        logit, c_out = self.out.forward(h)
        return float(logit[0]), (c_a, c_t, c_fc, c_act, c_drop, c_out)

    def backward_sample(self, cache, dlogit: float):
        c_a, c_t, c_fc, c_act, c_drop, c_out = cache
        dh = self.out.backward(c_out, np.array([dlogit]))
        dh = self.dropout.backward(c_drop, dh)
        dh = leaky_relu_backward(c_act, dh)
        dz = self.fc.backward(c_fc, dh)
        da = self.audio_branch.output_dim
        dt = self.text_branch.output_dim
        self.audio_branch.backward(c_a, dz[:da])
        self.text_branch.backward(c_t, dz[da : da + dt])
        return dz[da + dt :]  # gradient into the hand-crafted features

    def parameters(self) -> dict:
        out = {}
        for k, p in self.audio_branch.parameters().items():
            out[f"audio.{k}"] = p
        for k, p in self.text_branch.parameters().items():
            out[f"text.{k}"] = p
        for k, p in self.fc.parameters().items():
            out[f"fc.{k}"] = p
        for k, p in self.out.parameters().items():
            out[f"out.{k}"] = p
        return out

    def arch(self) -> dict:
        return {
            "kind": self.kind,
            "audio_dim": self.audio_dim,
            "text_dim": self.text_dim,
            "hand_dim": self.hand_dim,
            "hidden": self.hidden,
            "heads": self.heads,
            "lstm_layers": self.lstm_layers,
        }


def batch_loss_and_grads(model: BaselineClassifier, x: np.ndarray, y: np.ndarray, rng, training: bool):
    """Mean BCE over a batch for the baseline; accumulates parameter grads."""
    logits, cache = model.forward(x, rng, training)
    n = x.shape[0]
    losses = np.empty(n)
    dlogits = np.empty(n)
    for i in range(n):
        losses[i], dlogits[i] = bce_with_logits(logits[i], y[i])
    model.backward(cache, dlogits / n)
    return float(losses.mean()), logits


def save_model(path, model, extra_meta: dict | None = None) -> None:
    meta = {"arch": model.arch()}
    if extra_meta:
        meta.update(extra_meta)
    save_checkpoint(path, meta, model.parameters())


def load_model(path, cfg: Config):
    """Rebuild a model from a checkpoint; returns (model, meta)."""
    meta, arrays = load_checkpoint(path)
    arch = meta["arch"]
    rng = np.random.default_rng(0)  # weights are overwritten below
    if arch["kind"] == "baseline":
        model = BaselineClassifier(arch["input_dim"], cfg, rng)
    elif arch["kind"] == "fusion":
        model = FusionClassifier(
            arch["audio_dim"],
            arch["text_dim"],
            arch["hand_dim"],
            cfg,
            rng,
            lstm_layers=arch["lstm_layers"],
        )
    else:
        raise ValueError(f"unknown model kind {arch['kind']!r}")

    params = model.parameters()
    if set(params) != set(arrays):
        raise ValueError("checkpoint parameter names do not match the architecture")
    for name, arr in arrays.items():
        if params[name].value.shape != arr.shape:
            raise ValueError(f"shape mismatch for {name}")
        params[name].value[...] = arr
    return model, meta

"""Minimal neural network core on numpy with hand-derived backward passes.

All math is float64. Layers follow a stateless-cache convention:
``y, cache = layer.forward(x)`` and ``dx = layer.backward(cache, dy)``, where
backward accumulates parameter gradients as a side effect.
"""

from .layers import (
    BiLSTM,
    Dropout,
    Linear,
    LSTMCell,
    LSTMLayer,
    MultiHeadAttention,
    Parameter,
    bce_with_logits,
    leaky_relu,
    leaky_relu_backward,
    masked_mean_pool,
    masked_mean_pool_backward,
    sigmoid,
)
from .optim import AdamW
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "AdamW",
    "BiLSTM",
    "Dropout",
    "Linear",
    "LSTMCell",
    "LSTMLayer",
    "MultiHeadAttention",
    "Parameter",
    "bce_with_logits",
    "leaky_relu",
    "leaky_relu_backward",
    "load_checkpoint",
    "masked_mean_pool",
    "masked_mean_pool_backward",
    "save_checkpoint",
    "sigmoid",
]

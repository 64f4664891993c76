"""AdamW with decoupled weight decay."""

from __future__ import annotations

import numpy as np


class AdamW:
    """Per-parameter moment estimates with bias correction; weight decay is
    applied directly to the weights, not through the gradient."""

    def __init__(
        self,
        params: dict,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.01,
    ):
        self.params = dict(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay

    def zero_grad(self):
        for p in self.params.values():
            p.zero_grad()

    def step(self):
        for p in self.params.values():
            p.step_count += 1
            p.m = self.beta1 * p.m + (1.0 - self.beta1) * p.grad
            p.v = self.beta2 * p.v + (1.0 - self.beta2) * (p.grad * p.grad)
            m_hat = p.m / (1.0 - self.beta1**p.step_count)
            v_hat = p.v / (1.0 - self.beta2**p.step_count)
            # decay is decoupled: proportional to the pre-step weights
            p.value -= self.lr * (m_hat / (np.sqrt(v_hat) + self.eps) + self.weight_decay * p.value)

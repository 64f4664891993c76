"""Layers, activations and losses with explicit backward passes."""

from __future__ import annotations

import numpy as np


class Parameter:
    """Trainable tensor with its gradient and optimizer state."""

    def __init__(self, value: np.ndarray):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.m = np.zeros_like(self.value)
        self.v = np.zeros_like(self.value)
        self.step_count = 0

    def zero_grad(self):
        self.grad[...] = 0.0

    @property
    def shape(self):
        return self.value.shape


def uniform_init(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, shape)


def sigmoid(x):
    # stable in both tails
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def leaky_relu(x, slope: float = 0.01):
    y = np.where(x >= 0.0, x, slope * x)
    return y, (x, slope)


def leaky_relu_backward(cache, dy):
    x, slope = cache
    return dy * np.where(x >= 0.0, 1.0, slope)


def bce_with_logits(logit: float, target: float):
    """Binary cross entropy on a raw logit; returns (loss, dlogit).

    Uses the overflow-safe form max(z, 0) - z t + log(1 + exp(-|z|)).
    """
    z = float(logit)
    t = float(target)
    loss = max(z, 0.0) - z * t + np.log1p(np.exp(-abs(z)))
    grad = float(sigmoid(np.asarray([z]))[0]) - t
    return loss, grad


class Linear:
    """y = x @ W + b for x of shape [..., in_dim]."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.weight = Parameter(uniform_init(rng, in_dim, (in_dim, out_dim)))
        self.bias = Parameter(np.zeros(out_dim))

    def forward(self, x: np.ndarray):
        return x @ self.weight.value + self.bias.value, x

    def backward(self, cache, dy: np.ndarray):
        x = cache
        flat_x = x.reshape(-1, x.shape[-1])
        flat_dy = dy.reshape(-1, dy.shape[-1])
        self.weight.grad += flat_x.T @ flat_dy
        self.bias.grad += flat_dy.sum(axis=0)
        return dy @ self.weight.value.T

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}


class Dropout:
    """Inverted dropout; identity when not training."""

    def __init__(self, p: float):
        if not 0.0 <= p < 1.0:
            raise ValueError("dropout probability must be in [0, 1)")
        self.p = p

    def forward(self, x: np.ndarray, rng: np.random.Generator | None, training: bool):
        if not training or self.p == 0.0:
            return x, None
        mask = (rng.uniform(size=x.shape) >= self.p) / (1.0 - self.p)
        return x * mask, mask

    def backward(self, cache, dy: np.ndarray):
        if cache is None:
            return dy
        return dy * cache


class LSTMCell:
    """Single LSTM step. Gate order in the packed dimension is (i, f, g, o);
    the forget-gate bias starts at +1."""

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        h = hidden_dim
        self.hidden_dim = h
        self.w_x = Parameter(uniform_init(rng, input_dim, (input_dim, 4 * h)))
        self.w_h = Parameter(uniform_init(rng, h, (h, 4 * h)))
        bias = np.zeros(4 * h)
        bias[h : 2 * h] = 1.0
        self.bias = Parameter(bias)

    def forward(self, x_t: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray):
        h = self.hidden_dim
        z = x_t @ self.w_x.value + h_prev @ self.w_h.value + self.bias.value
        i = sigmoid(z[0:h])
        f = sigmoid(z[h : 2 * h])
        g = np.tanh(z[2 * h : 3 * h])
        o = sigmoid(z[3 * h : 4 * h])
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h_new = o * tc
        cache = (x_t, h_prev, c_prev, i, f, g, o, tc)
        return h_new, c, cache

    def backward(self, cache, dh: np.ndarray, dc_in: np.ndarray):
        x_t, h_prev, c_prev, i, f, g, o, tc = cache
        h = self.hidden_dim

        do = dh * tc
        dc = dc_in + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc_prev = dc * f

        dz = np.empty(4 * h)
        dz[0:h] = di * i * (1.0 - i)
        dz[h : 2 * h] = df * f * (1.0 - f)
        dz[2 * h : 3 * h] = dg * (1.0 - g * g)
        dz[3 * h : 4 * h] = do * o * (1.0 - o)

        self.w_x.grad += np.outer(x_t, dz)
        self.w_h.grad += np.outer(h_prev, dz)
        self.bias.grad += dz
        dx = dz @ self.w_x.value.T
        dh_prev = dz @ self.w_h.value.T
        return dx, dh_prev, dc_prev

    def parameters(self):
        return {"w_x": self.w_x, "w_h": self.w_h, "bias": self.bias}


class LSTMLayer:
    """Unidirectional LSTM over a [T, input_dim] sequence."""

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator, reverse: bool = False):
        self.cell = LSTMCell(input_dim, hidden_dim, rng)
        self.reverse = reverse

    def forward(self, x: np.ndarray):
        t_len = x.shape[0]
        h_dim = self.cell.hidden_dim
        order = range(t_len - 1, -1, -1) if self.reverse else range(t_len)
        h = np.zeros(h_dim)
        c = np.zeros(h_dim)
        outputs = np.zeros((t_len, h_dim))
        caches = [None] * t_len
        for t in order:
            h, c, caches[t] = self.cell.forward(x[t], h, c)
            outputs[t] = h
        return outputs, caches

    def backward(self, caches, d_out: np.ndarray):
        t_len = d_out.shape[0]
        h_dim = self.cell.hidden_dim
        # walk opposite to the forward order
        order = range(t_len) if self.reverse else range(t_len - 1, -1, -1)
        dx = np.zeros((t_len, self.cell.w_x.shape[0]))
        dh_next = np.zeros(h_dim)
        dc_next = np.zeros(h_dim)
        for t in order:
            dx[t], dh_next, dc_next = self.cell.backward(caches[t], d_out[t] + dh_next, dc_next)
        return dx

    def parameters(self):
        return {f"cell.{k}": p for k, p in self.cell.parameters().items()}


class BiLSTM:
    """Stack of bidirectional LSTM layers; output is [T, 2 * hidden_dim]."""

    def __init__(self, input_dim: int, hidden_dim: int, num_layers: int, rng: np.random.Generator):
        self.layers = []
        dim = input_dim
        for _ in range(num_layers):
            fwd = LSTMLayer(dim, hidden_dim, rng, reverse=False)
            bwd = LSTMLayer(dim, hidden_dim, rng, reverse=True)
            self.layers.append((fwd, bwd))
            dim = 2 * hidden_dim
        self.output_dim = dim

    def forward(self, x: np.ndarray):
        caches = []
        for fwd, bwd in self.layers:
            hf, cf = fwd.forward(x)
            hb, cb = bwd.forward(x)
            caches.append((cf, cb))
            x = np.concatenate([hf, hb], axis=1)
        return x, caches

    def backward(self, caches, dy: np.ndarray):
        h = self.layers[0][0].cell.hidden_dim
        for (fwd, bwd), (cf, cb) in zip(reversed(self.layers), reversed(caches)):
            dx = fwd.backward(cf, dy[:, :h]) + bwd.backward(cb, dy[:, h:])
            dy = dx
        return dy

    def parameters(self):
        out = {}
        for i, (fwd, bwd) in enumerate(self.layers):
            for k, p in fwd.parameters().items():
                out[f"layer{i}.fwd.{k}"] = p
            for k, p in bwd.parameters().items():
                out[f"layer{i}.bwd.{k}"] = p
        return out


def _softmax_last(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class MultiHeadAttention:
    """Self-attention over a [T, d_model] sequence with combined projections."""

    def __init__(self, d_model: int, num_heads: int, rng: np.random.Generator):
        if d_model % num_heads != 0:
            raise ValueError("d_model must divide evenly into heads")
        self.d_model = d_model
        self.num_heads = num_heads
        self.head_dim = d_model // num_heads
        self.w_q = Linear(d_model, d_model, rng)
        self.w_k = Linear(d_model, d_model, rng)
        self.w_v = Linear(d_model, d_model, rng)
        self.w_o = Linear(d_model, d_model, rng)

    def _split(self, x: np.ndarray) -> np.ndarray:
        t_len = x.shape[0]
        return x.reshape(t_len, self.num_heads, self.head_dim).transpose(1, 0, 2)

    def _merge(self, x: np.ndarray) -> np.ndarray:
        return x.transpose(1, 0, 2).reshape(-1, self.d_model)

    def forward(self, x: np.ndarray, mask: np.ndarray | None = None):
        q, cq = self.w_q.forward(x)
        k, ck = self.w_k.forward(x)
        v, cv = self.w_v.forward(x)
        qh, kh, vh = self._split(q), self._split(k), self._split(v)

        scale = 1.0 / np.sqrt(self.head_dim)
        scores = qh @ kh.transpose(0, 2, 1) * scale
        if mask is not None:
            scores = np.where(mask[None, None, :], scores, -1e9)
        attn = _softmax_last(scores)
        ctx = attn @ vh
        merged = self._merge(ctx)
        y, co = self.w_o.forward(merged)
        cache = (cq, ck, cv, co, qh, kh, vh, attn, scale)
        return y, cache

    def backward(self, cache, dy: np.ndarray):
        cq, ck, cv, co, qh, kh, vh, attn, scale = cache
        d_merged = self.w_o.backward(co, dy)
        d_ctx = self._split(d_merged)

        d_attn = d_ctx @ vh.transpose(0, 2, 1)
        dvh = attn.transpose(0, 2, 1) @ d_ctx
        # softmax backward, rowwise over the last axis
        d_scores = attn * (d_attn - (d_attn * attn).sum(axis=-1, keepdims=True))
        d_scores *= scale
        dqh = d_scores @ kh
        dkh = d_scores.transpose(0, 2, 1) @ qh

        dx = self.w_q.backward(cq, self._merge(dqh))
        dx = dx + self.w_k.backward(ck, self._merge(dkh))
        dx = dx + self.w_v.backward(cv, self._merge(dvh))
        return dx

    def parameters(self):
        out = {}
        for name, lin in (("w_q", self.w_q), ("w_k", self.w_k), ("w_v", self.w_v), ("w_o", self.w_o)):
            for k, p in lin.parameters().items():
                out[f"{name}.{k}"] = p
        return out


def masked_mean_pool(x: np.ndarray, mask: np.ndarray | None = None):
    """Mean over time of the valid rows of [T, d]."""
    if mask is None:
        return x.mean(axis=0), (x.shape[0], None)
    mask = np.asarray(mask, dtype=bool)
    n = int(mask.sum())
    if n == 0:
        raise ValueError("mean pool needs at least one valid row")
    return x[mask].sum(axis=0) / n, (x.shape[0], mask)


def masked_mean_pool_backward(cache, dy: np.ndarray) -> np.ndarray:
    t_len, mask = cache
    if mask is None:
        return np.tile(dy / t_len, (t_len, 1))
    out = np.zeros((t_len, dy.shape[0]))
    out[mask] = dy / int(mask.sum())
    return out

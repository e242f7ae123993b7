"""Transformer building blocks composed from autodiff ops."""

from __future__ import annotations

import math

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor


def init_linear(store, name, fan_in, fan_out, rng, zero=False):
    if zero:
        w = np.zeros((fan_in, fan_out))
        b = np.zeros(fan_out)
    else:
        bound = 1.0 / math.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        b = rng.uniform(-bound, bound, size=fan_out)
    return store.add(f"{name}.w", w), store.add(f"{name}.b", b)


def init_layer_norm(store, name, dim):
    return store.add(f"{name}.gamma", np.ones(dim)), store.add(f"{name}.beta", np.zeros(dim))


def init_conv(store, name, kernel, c_in, c_out, rng):
    bound = 1.0 / math.sqrt(kernel * c_in)
    w = rng.uniform(-bound, bound, size=(kernel, c_in, c_out))
    b = rng.uniform(-bound, bound, size=c_out)
    return store.add(f"{name}.w", w), store.add(f"{name}.b", b)


def split_heads(x: Tensor, heads: int) -> Tensor:
    """(B, N, w) -> (B, H, N, w//H)."""
    b, n, w = x.shape
    return ad.swapaxes(ad.reshape(x, (b, n, heads, w // heads)), 1, 2)


def merge_heads(x: Tensor) -> Tensor:
    """(B, H, N, d) -> (B, N, H*d)."""
    b, h, n, d = x.shape
    return ad.reshape(ad.swapaxes(x, 1, 2), (b, n, h * d))


def attention(q: Tensor, k: Tensor, v: Tensor, key_mask: np.ndarray, heads: int):
    """Scaled dot-product attention; returns (context, probs).

    ``q``/``k``/``v`` are already projected (B, N, w); masked keys receive
    exactly zero weight and a query with no valid key yields a zero context
    row.
    """
    head_dim = q.shape[-1] // heads
    qh = split_heads(q, heads)
    kh = split_heads(k, heads)
    vh = split_heads(v, heads)
    scores = ad.scale(ad.matmul(qh, ad.swapaxes(kh, -1, -2)), 1.0 / math.sqrt(head_dim))
    probs = ad.softmax_masked(scores, key_mask)
    ctx = ad.matmul(probs, vh)
    return merge_heads(ctx), probs


class SelfAttention:
    def __init__(self, store, name, width, heads, rng):
        self.heads = heads
        self.width = width
        self.qkv_w, self.qkv_b = init_linear(store, f"{name}.qkv", width, 3 * width, rng)
        self.out_w, self.out_b = init_linear(store, f"{name}.out", width, width, rng)

    def __call__(self, x: Tensor, key_mask: np.ndarray) -> Tensor:
        qkv = ad.linear(x, self.qkv_w, self.qkv_b)
        q = ad.take(qkv, slice(0, self.width), axis=2)
        k = ad.take(qkv, slice(self.width, 2 * self.width), axis=2)
        v = ad.take(qkv, slice(2 * self.width, 3 * self.width), axis=2)
        ctx, _ = attention(q, k, v, key_mask, self.heads)
        return ad.linear(ctx, self.out_w, self.out_b)


class CrossAttention:
    def __init__(self, store, name, width, heads, rng):
        self.heads = heads
        self.width = width
        self.q_w, self.q_b = init_linear(store, f"{name}.q", width, width, rng)
        self.kv_w, self.kv_b = init_linear(store, f"{name}.kv", width, 2 * width, rng)
        self.out_w, self.out_b = init_linear(store, f"{name}.out", width, width, rng)

    def __call__(self, x: Tensor, memory: Tensor, key_mask: np.ndarray) -> Tensor:
        """Queries from ``x``, keys/values from ``memory``.

        When an item's mask has no valid key the whole sub-layer output for
        that item is exactly zero (gate applied after the out-projection so
        its bias cannot leak through).
        """
        q = ad.linear(x, self.q_w, self.q_b)
        kv = ad.linear(memory, self.kv_w, self.kv_b)
        k = ad.take(kv, slice(0, self.width), axis=2)
        v = ad.take(kv, slice(self.width, 2 * self.width), axis=2)
        ctx, _ = attention(q, k, v, key_mask, self.heads)
        out = ad.linear(ctx, self.out_w, self.out_b)
        gate = key_mask.any(axis=1).astype(out.dtype)[:, None, None]
        return ad.mul(out, ad.constant(gate))


class FeedForward:
    def __init__(self, store, name, width, hidden, rng):
        self.w1, self.b1 = init_linear(store, f"{name}.fc1", width, hidden, rng)
        self.w2, self.b2 = init_linear(store, f"{name}.fc2", hidden, width, rng)

    def __call__(self, x: Tensor) -> Tensor:
        return ad.linear(ad.gelu(ad.linear(x, self.w1, self.b1)), self.w2, self.b2)


class LayerNorm:
    def __init__(self, store, name, dim):
        self.gamma, self.beta = init_layer_norm(store, name, dim)

    def __call__(self, x: Tensor) -> Tensor:
        return ad.layer_norm(x, self.gamma, self.beta)


def zero_padded(x: Tensor, frame_mask: np.ndarray) -> Tensor:
    """Force padded frame rows to zero (keeps the token invariant visible)."""
    maskf = frame_mask.astype(x.dtype)[:, :, None]
    return ad.mul(x, ad.constant(maskf))


class EncoderBlock:
    """Pre-norm self-attention + feed-forward residual block."""

    def __init__(self, store, name, width, hidden, heads, rng):
        self.ln1 = LayerNorm(store, f"{name}.ln1", width)
        self.attn = SelfAttention(store, f"{name}.attn", width, heads, rng)
        self.ln2 = LayerNorm(store, f"{name}.ln2", width)
        self.ffn = FeedForward(store, f"{name}.ffn", width, hidden, rng)

    def __call__(self, x: Tensor, key_mask: np.ndarray) -> Tensor:
        x = ad.add(x, self.attn(self.ln1(x), key_mask))
        return ad.add(x, self.ffn(self.ln2(x)))


def sinusoidal_embedding(positions, dim: int) -> np.ndarray:
    """Fixed sin/cos features of integer positions, shape (len, dim)."""
    positions = np.asarray(positions, dtype=float)
    half = dim // 2
    freqs = np.exp(-math.log(10000.0) * np.arange(half) / half)
    args = positions[:, None] * freqs[None, :]
    emb = np.concatenate([np.sin(args), np.cos(args)], axis=1)
    if dim % 2:
        emb = np.concatenate([emb, np.zeros((len(positions), 1))], axis=1)
    return emb

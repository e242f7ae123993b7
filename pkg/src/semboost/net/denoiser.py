"""The denoising network: context-encoding stage plus word-aligned decoder.

The network predicts the clean motion directly from a noised one. Frame
tokens first pass a convolution + masked max-pool stage that distills one
global context vector, concatenated back onto every token (then two encoder
layers); the decoder alternates self-attention over [condition token ||
frames] with cross-attention against the caption's word embeddings. All
gradients are analytic; see tests for the finite-difference oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..textembed import TextCondition
from .layers import (
    CrossAttention,
    EncoderBlock,
    FeedForward,
    LayerNorm,
    SelfAttention,
    init_conv,
    init_linear,
    sinusoidal_embedding,
    zero_padded,
)
from .params import ParamStore


@dataclass(frozen=True)
class DenoiserConfig:
    feature_dim: int = 269
    width: int = 512
    ff_width: int = 1024
    heads: int = 4
    defe_layers: int = 2  # encoder layers after the global-token fuse
    sad_layers: int = 6  # decoder layers with word cross-attention
    conv_layers: int = 3
    conv_kernel: int = 3
    max_frames: int = 196
    t_embed_width: int = 512
    text_width: int = 512

    def __post_init__(self):
        if self.width % self.heads:
            raise ValueError("width must be divisible by heads")
        if self.defe_layers < 1 or self.sad_layers < 1:
            raise ValueError("need at least one encoder and one decoder layer")
        if self.conv_kernel % 2 == 0:
            raise ValueError("conv kernel must be odd (same padding)")

    @property
    def total_layers(self) -> int:
        return self.defe_layers + self.sad_layers


def param_count(cfg: DenoiserConfig) -> int:
    """Closed-form parameter count; asserted against the built model.

    lin(i,o) = i*o + o. Total =
      lin(D,w) + lin(tew,w) + lin(w,w)              input + timestep MLP
      + conv_layers * (k*w*w + w)                    conv stack
      + lin(2w,w)                                    global-token fuse
      + defe_layers * (2w + lin(w,3w) + lin(w,w) + 2w + lin(w,ff) + lin(ff,w))
      + 2 * lin(tx,w)                                sentence + word projections
      + sad_layers * (encoder block + 2w + lin(w,w) + lin(w,2w) + lin(w,w)
                      + 2w + lin(w,ff) + lin(ff,w))
      + 2w + lin(w,D)                                final norm + output
    """
    w, ff = cfg.width, cfg.ff_width
    d, tew, tx = cfg.feature_dim, cfg.t_embed_width, cfg.text_width

    def lin(i, o):
        return i * o + o

    ln = 2 * w
    self_attn = lin(w, 3 * w) + lin(w, w)
    cross_attn = lin(w, w) + lin(w, 2 * w) + lin(w, w)
    ffn = lin(w, ff) + lin(ff, w)
    enc_block = ln + self_attn + ln + ffn
    sad_block = enc_block + ln + cross_attn + ln + ffn
    return (
        lin(d, w)
        + lin(tew, w)
        + lin(w, w)
        + cfg.conv_layers * (cfg.conv_kernel * w * w + w)
        + lin(2 * w, w)
        + cfg.defe_layers * enc_block
        + lin(tx, w)
        + lin(tx, w)
        + cfg.sad_layers * sad_block
        + ln
        + lin(w, d)
    )


@dataclass(frozen=True)
class FrameTokens:
    """Per-frame token matrix with its validity mask; padded rows are zero."""

    tokens: np.ndarray  # (B, N, width)
    mask: np.ndarray  # (B, N) bool

    def __post_init__(self):
        if self.tokens.ndim != 3 or self.mask.shape != self.tokens.shape[:2]:
            raise ValueError("tokens must be (B, N, w) with a (B, N) mask")
        if not self.mask.any(axis=1).all():
            raise ValueError("every sequence needs at least one real frame")
        if np.any(self.tokens[~self.mask] != 0.0):
            raise ValueError("padded token rows must be zero")


@dataclass(frozen=True)
class GlobalToken:
    vec: np.ndarray  # (B, width)

    def __post_init__(self):
        if not np.all(np.isfinite(self.vec)):
            raise ValueError("non-finite global token")


class _SadLayer:
    def __init__(self, store, name, width, hidden, heads, rng):
        self.block = EncoderBlock(store, f"{name}.selfblk", width, hidden, heads, rng)
        self.ln_cross = LayerNorm(store, f"{name}.ln_cross", width)
        self.cross = CrossAttention(store, f"{name}.cross", width, heads, rng)
        self.ln_ffn = LayerNorm(store, f"{name}.ln_ffn", width)
        self.ffn = FeedForward(store, f"{name}.ffn", width, hidden, rng)


class Denoiser:
    def __init__(
        self,
        config: DenoiserConfig,
        seed: int = 0,
        dtype=np.float32,
        zero_final: bool = True,
    ):
        self.config = config
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(seed)
        store = ParamStore(dtype=self.dtype)
        w, ff, heads = config.width, config.ff_width, config.heads

        self.in_w, self.in_b = init_linear(store, "input", config.feature_dim, w, rng)
        self.t1_w, self.t1_b = init_linear(store, "t_mlp1", config.t_embed_width, w, rng)
        self.t2_w, self.t2_b = init_linear(store, "t_mlp2", w, w, rng)
        self.convs = [
            init_conv(store, f"conv{i}", config.conv_kernel, w, w, rng)
            for i in range(config.conv_layers)
        ]
        self.fuse_w, self.fuse_b = init_linear(store, "fuse", 2 * w, w, rng)
        self.defe_blocks = [
            EncoderBlock(store, f"defe{i}", w, ff, heads, rng)
            for i in range(config.defe_layers)
        ]
        self.cond_w, self.cond_b = init_linear(store, "cond", config.text_width, w, rng)
        self.word_w, self.word_b = init_linear(store, "words", config.text_width, w, rng)
        self.sad_blocks = [
            _SadLayer(store, f"sad{i}", w, ff, heads, rng)
            for i in range(config.sad_layers)
        ]
        self.ln_final = LayerNorm(store, "final_norm", w)
        self.out_w, self.out_b = init_linear(
            store, "output", w, config.feature_dim, rng, zero=zero_final
        )
        store.freeze()
        self.store = store
        assert store.n_params == param_count(config), "parameter formula drifted"

        self._pos_table = sinusoidal_embedding(
            np.arange(config.max_frames), w
        ).astype(self.dtype)

    # ---------------------------------------------------------------- stages

    def _timestep_embedding(self, t: np.ndarray) -> Tensor:
        table = sinusoidal_embedding(t, self.config.t_embed_width).astype(self.dtype)
        h = ad.gelu(ad.linear(ad.constant(table), self.t1_w, self.t1_b))
        return ad.linear(h, self.t2_w, self.t2_b)

    def _defe(self, tokens: Tensor, temb: Tensor, fmask: np.ndarray) -> Tensor:
        b, n, w = tokens.shape
        h = ad.add(tokens, ad.reshape(temb, (b, 1, w)))
        h = zero_padded(h, fmask)
        y = h
        for conv_w, conv_b in self.convs:
            y = zero_padded(ad.gelu(ad.conv1d_same(y, conv_w, conv_b)), fmask)
        xg = ad.masked_max_time(y, fmask)
        fused = ad.concat([h, ad.expand_time(xg, n)], axis=2)
        h = ad.linear(fused, self.fuse_w, self.fuse_b)
        h = ad.add(h, ad.constant(self._pos_table[None, :n, :]))
        h = zero_padded(h, fmask)
        for block in self.defe_blocks:
            h = zero_padded(block(h, fmask), fmask)
        return h

    def _sad(
        self,
        layer: _SadLayer,
        frames: Tensor,
        cond_tok: Tensor,
        words_h: Tensor,
        fmask: np.ndarray,
        wmask: np.ndarray,
    ) -> Tensor:
        b, n, w = frames.shape
        seq = ad.concat([ad.reshape(cond_tok, (b, 1, w)), frames], axis=1)
        seq_mask = np.concatenate([np.ones((b, 1), dtype=bool), fmask], axis=1)
        seq = layer.block(seq, seq_mask)
        f = zero_padded(ad.take(seq, slice(1, None), axis=1), fmask)
        f = ad.add(f, layer.cross(layer.ln_cross(f), words_h, wmask))
        f = zero_padded(f, fmask)
        f = ad.add(f, layer.ffn(layer.ln_ffn(f)))
        return zero_padded(f, fmask)

    # ----------------------------------------------------------------- graph

    def predict_tensor(
        self,
        x: np.ndarray,
        t: np.ndarray,
        sentence: np.ndarray,
        words: np.ndarray,
        word_mask: np.ndarray,
        frame_mask: np.ndarray | None = None,
    ) -> Tensor:
        """Full graph over a batch; inputs are raw arrays in any dtype."""
        x = np.asarray(x, dtype=self.dtype)
        b, n, d = x.shape
        if d != self.config.feature_dim:
            raise ValueError(f"feature dim {d} != configured {self.config.feature_dim}")
        if n > self.config.max_frames:
            raise ValueError(f"{n} frames exceed max_frames {self.config.max_frames}")
        t = np.asarray(t)
        if np.any(t < 1):
            raise ValueError("timesteps must be >= 1")
        if frame_mask is None:
            frame_mask = np.ones((b, n), dtype=bool)

        tokens = zero_padded(
            ad.linear(ad.constant(x), self.in_w, self.in_b), frame_mask
        )
        temb = self._timestep_embedding(t)
        h = self._defe(tokens, temb, frame_mask)

        sentence = np.asarray(sentence, dtype=self.dtype)
        words = np.asarray(words, dtype=self.dtype)
        cond_tok = ad.add(ad.linear(ad.constant(sentence), self.cond_w, self.cond_b), temb)
        words_h = ad.linear(ad.constant(words), self.word_w, self.word_b)
        for layer in self.sad_blocks:
            h = self._sad(layer, h, cond_tok, words_h, frame_mask, word_mask)
        return ad.linear(self.ln_final(h), self.out_w, self.out_b)

    def forward_batch(self, x, t, sentence, words, word_mask, frame_mask=None):
        return self.predict_tensor(x, t, sentence, words, word_mask, frame_mask).data

    def forward(self, x: np.ndarray, t: int, cond: TextCondition) -> np.ndarray:
        """Single-sequence convenience wrapper: (N, D) in, (N, D) out."""
        out = self.forward_batch(
            x[None, :, :],
            np.array([t]),
            cond.sentence[None, :],
            cond.words[None, :, :],
            cond.mask[None, :],
        )
        return out[0]

    # ------------------------------------------------- inspection interfaces

    def defe_encode(self, frames: FrameTokens, t_embedding: np.ndarray) -> FrameTokens:
        """Run the context-encoder stage on prepared frame tokens."""
        temb = ad.constant(np.asarray(t_embedding, dtype=self.dtype))
        out = self._defe(
            ad.constant(np.asarray(frames.tokens, dtype=self.dtype)),
            temb,
            frames.mask,
        )
        return FrameTokens(tokens=out.data, mask=frames.mask)

    def compute_global_token(
        self, frames: FrameTokens, t_embedding: np.ndarray
    ) -> GlobalToken:
        """Conv stack + masked max-pool only (the global context vector)."""
        temb = ad.constant(np.asarray(t_embedding, dtype=self.dtype))
        tokens = ad.constant(np.asarray(frames.tokens, dtype=self.dtype))
        b, n, w = tokens.shape
        h = zero_padded(ad.add(tokens, ad.reshape(temb, (b, 1, w))), frames.mask)
        y = h
        for conv_w, conv_b in self.convs:
            y = zero_padded(ad.gelu(ad.conv1d_same(y, conv_w, conv_b)), frames.mask)
        return GlobalToken(vec=ad.masked_max_time(y, frames.mask).data)

    def sad_layer(
        self,
        index: int,
        frames: FrameTokens,
        cond_token: np.ndarray,
        words: TextCondition,
    ) -> FrameTokens:
        """Run one decoder layer; the condition token passes through as
        given (each layer re-reads the same token)."""
        words_h = ad.linear(
            ad.constant(words.words[None].astype(self.dtype)
                        if words.words.ndim == 2 else words.words.astype(self.dtype)),
            self.word_w,
            self.word_b,
        )
        wmask = words.mask[None] if words.mask.ndim == 1 else words.mask
        out = self._sad(
            self.sad_blocks[index],
            ad.constant(np.asarray(frames.tokens, dtype=self.dtype)),
            ad.constant(np.asarray(cond_token, dtype=self.dtype)),
            words_h,
            frames.mask,
            wmask,
        )
        return FrameTokens(tokens=out.data, mask=frames.mask)

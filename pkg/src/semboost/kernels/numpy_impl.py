"""Pure-numpy reference implementations of the hot inner-loop kernels.

Every function here has a signature-identical twin in ``numba_impl``; the
active lane is picked in ``semboost.kernels`` via the SEMBOOST_BACKEND env
var. These are the kernels that sit inside the training loop, so both lanes
must agree numerically (see tests) and support float32 and float64.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

_INV_SQRT2 = 0.7071067811865476
_INV_SQRT_2PI = 0.3989422804014327


def attn_softmax_fwd(scores, key_mask):
    """Masked softmax over the last axis of (B, H, Q, K) scores.

    ``key_mask`` is (B, K) with nonzero marking valid keys. Masked keys get
    exactly zero weight; a row with no valid key comes back all zero.
    """
    maskf = key_mask[:, None, None, :] != 0
    neg = np.array(-np.inf, dtype=scores.dtype)
    masked = np.where(maskf, scores, neg)
    m = masked.max(axis=-1, keepdims=True)
    m = np.where(np.isfinite(m), m, scores.dtype.type(0))
    e = np.exp(masked - m)
    e = np.where(maskf, e, scores.dtype.type(0))
    z = e.sum(axis=-1, keepdims=True)
    z = np.where(z > 0, z, scores.dtype.type(1))
    return e / z


def softmax_bwd(probs, gout):
    """VJP of softmax over the last axis; masked entries have probs == 0."""
    inner = np.sum(probs * gout, axis=-1, keepdims=True)
    return probs * (gout - inner)


def layer_norm_fwd(x, gamma, beta, eps):
    """Row-wise layer norm of (R, C); returns (y, mean, rstd)."""
    mean = x.mean(axis=-1)
    var = np.square(x - mean[:, None]).mean(axis=-1)
    rstd = 1.0 / np.sqrt(var + eps)
    rstd = rstd.astype(x.dtype)
    mean = mean.astype(x.dtype)
    y = (x - mean[:, None]) * rstd[:, None] * gamma + beta
    return y, mean, rstd


def layer_norm_bwd(gout, x, mean, rstd, gamma):
    """VJP of layer_norm_fwd; returns (gx, ggamma, gbeta)."""
    xhat = (x - mean[:, None]) * rstd[:, None]
    gy = gout * gamma
    gmean = gy.mean(axis=-1, keepdims=True)
    gproj = (gy * xhat).mean(axis=-1, keepdims=True)
    gx = rstd[:, None] * (gy - gmean - xhat * gproj)
    ggamma = np.sum(gout * xhat, axis=0)
    gbeta = np.sum(gout, axis=0)
    return gx, ggamma, gbeta


def gelu_fwd(x):
    """Exact (erf-based) GELU; returns (y, cdf) so the backward pass can
    reuse the expensive erf."""
    cdf = (0.5 * (1.0 + erf(x * _INV_SQRT2))).astype(x.dtype)
    return x * cdf, cdf


def gelu_bwd(x, cdf, gout):
    """VJP of gelu_fwd given the saved cdf."""
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return (gout * (cdf + x * pdf)).astype(x.dtype)


def masked_max_fwd(x, frame_mask):
    """Max over the time axis of (B, N, C), ignoring masked frames.

    Returns (values (B, C), argmax indices (B, C)); ties resolve to the
    lowest frame index. Rows must have at least one valid frame.
    """
    neg = np.array(-np.inf, dtype=x.dtype)
    xm = np.where(frame_mask[:, :, None] != 0, x, neg)
    idx = np.argmax(xm, axis=1)
    y = np.take_along_axis(xm, idx[:, None, :], axis=1)[:, 0, :]
    return y, idx.astype(np.int64)


def masked_max_bwd(gout, idx, n_frames):
    """VJP of masked_max_fwd: routes each gradient to its argmax frame."""
    b, c = gout.shape
    gx = np.zeros((b, n_frames, c), dtype=gout.dtype)
    np.put_along_axis(gx, idx[:, None, :], gout[:, None, :], axis=1)
    return gx


def adamw_update(p, g, m, v, lr, beta1, beta2, eps, weight_decay, bc1, bc2):
    """One decoupled-weight-decay Adam step, in place on flat arrays.

    ``bc1``/``bc2`` are the bias-correction terms 1 - beta^t for the current
    step count.
    """
    if weight_decay != 0.0:
        p -= lr * weight_decay * p
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * np.square(g)
    denom = np.sqrt(v / bc2) + eps
    p -= lr * (m / bc1) / denom


def ema_update(ema, p, decay):
    """ema = decay * ema + (1 - decay) * p, in place."""
    ema *= decay
    ema += (1.0 - decay) * p

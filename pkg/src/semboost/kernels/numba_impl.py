"""Numba-jitted lane of the hot kernels; see numpy_impl for the contracts.

Kept fastmath-free so float64 gradient checks see the same arithmetic as the
reference lane, and serial: these kernels run on small batch-sized arrays
where thread-launch overhead would dominate any parallel win.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_INV_SQRT2 = 0.7071067811865476
_INV_SQRT_2PI = 0.3989422804014327


@njit(cache=True)
def attn_softmax_fwd(scores, key_mask):
    b, h, q, k = scores.shape
    out = np.zeros_like(scores)
    for bi in range(b):
        for hi in range(h):
            for qi in range(q):
                m = -np.inf
                for ki in range(k):
                    if key_mask[bi, ki] != 0 and scores[bi, hi, qi, ki] > m:
                        m = scores[bi, hi, qi, ki]
                if m == -np.inf:
                    continue
                z = 0.0
                for ki in range(k):
                    if key_mask[bi, ki] != 0:
                        e = math.exp(scores[bi, hi, qi, ki] - m)
                        out[bi, hi, qi, ki] = e
                        z += e
                for ki in range(k):
                    out[bi, hi, qi, ki] /= z
    return out


@njit(cache=True)
def softmax_bwd(probs, gout):
    flat_p = probs.reshape(-1, probs.shape[-1])
    flat_g = gout.reshape(-1, gout.shape[-1])
    out = np.empty_like(flat_p)
    rows, cols = flat_p.shape
    for r in range(rows):
        inner = 0.0
        for c in range(cols):
            inner += flat_p[r, c] * flat_g[r, c]
        for c in range(cols):
            out[r, c] = flat_p[r, c] * (flat_g[r, c] - inner)
    return out.reshape(probs.shape)


@njit(cache=True)
def layer_norm_fwd(x, gamma, beta, eps):
    rows, cols = x.shape
    y = np.empty_like(x)
    mean = np.empty(rows, dtype=x.dtype)
    rstd = np.empty(rows, dtype=x.dtype)
    for r in range(rows):
        mu = 0.0
        for c in range(cols):
            mu += x[r, c]
        mu /= cols
        var = 0.0
        for c in range(cols):
            d = x[r, c] - mu
            var += d * d
        var /= cols
        rs = 1.0 / math.sqrt(var + eps)
        mean[r] = mu
        rstd[r] = rs
        for c in range(cols):
            y[r, c] = (x[r, c] - mu) * rs * gamma[c] + beta[c]
    return y, mean, rstd


@njit(cache=True)
def layer_norm_bwd(gout, x, mean, rstd, gamma):
    rows, cols = x.shape
    gx = np.empty_like(x)
    ggamma = np.zeros(cols, dtype=x.dtype)
    gbeta = np.zeros(cols, dtype=x.dtype)
    for r in range(rows):
        gmean = 0.0
        gproj = 0.0
        for c in range(cols):
            xhat = (x[r, c] - mean[r]) * rstd[r]
            gy = gout[r, c] * gamma[c]
            gmean += gy
            gproj += gy * xhat
        gmean /= cols
        gproj /= cols
        for c in range(cols):
            xhat = (x[r, c] - mean[r]) * rstd[r]
            gy = gout[r, c] * gamma[c]
            gx[r, c] = rstd[r] * (gy - gmean - xhat * gproj)
    for r in range(rows):
        for c in range(cols):
            xhat = (x[r, c] - mean[r]) * rstd[r]
            ggamma[c] += gout[r, c] * xhat
            gbeta[c] += gout[r, c]
    return gx, ggamma, gbeta


@njit(cache=True)
def gelu_fwd(x):
    flat = x.ravel()
    out = np.empty_like(flat)
    cdf = np.empty_like(flat)
    for i in range(flat.size):
        c = 0.5 * (1.0 + math.erf(flat[i] * _INV_SQRT2))
        cdf[i] = c
        out[i] = flat[i] * c
    return out.reshape(x.shape), cdf.reshape(x.shape)


@njit(cache=True)
def gelu_bwd(x, cdf, gout):
    flat = x.ravel()
    cflat = cdf.ravel()
    gflat = gout.ravel()
    out = np.empty_like(flat)
    for i in range(flat.size):
        pdf = _INV_SQRT_2PI * math.exp(-0.5 * flat[i] * flat[i])
        out[i] = gflat[i] * (cflat[i] + flat[i] * pdf)
    return out.reshape(x.shape)


@njit(cache=True)
def masked_max_fwd(x, frame_mask):
    b, n, c = x.shape
    y = np.full((b, c), -np.inf, dtype=x.dtype)
    idx = np.zeros((b, c), dtype=np.int64)
    for bi in range(b):
        for ci in range(c):
            best = -np.inf
            best_i = 0
            found = False
            for ni in range(n):
                if frame_mask[bi, ni] != 0 and x[bi, ni, ci] > best:
                    best = x[bi, ni, ci]
                    best_i = ni
                    found = True
            if found:
                y[bi, ci] = best
                idx[bi, ci] = best_i
    return y, idx


@njit(cache=True)
def masked_max_bwd(gout, idx, n_frames):
    b, c = gout.shape
    gx = np.zeros((b, n_frames, c), dtype=gout.dtype)
    for bi in range(b):
        for ci in range(c):
            gx[bi, idx[bi, ci], ci] = gout[bi, ci]
    return gx


@njit(cache=True)
def adamw_update(p, g, m, v, lr, beta1, beta2, eps, weight_decay, bc1, bc2):
    for i in range(p.size):
        if weight_decay != 0.0:
            p[i] -= lr * weight_decay * p[i]
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i]
        p[i] -= lr * (m[i] / bc1) / (math.sqrt(v[i] / bc2) + eps)


@njit(cache=True)
def ema_update(ema, p, decay):
    for i in range(ema.size):
        ema[i] = decay * ema[i] + (1.0 - decay) * p[i]

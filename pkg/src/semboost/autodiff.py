"""Small reverse-mode autodiff over numpy arrays.

Built around fused ops (layer norm, masked softmax, GELU, conv, masked
max-pool) whose inner loops live in ``semboost.kernels`` so the jitted and
pure-numpy lanes are interchangeable. Gradients flow only toward tensors
created with ``parameter`` (or derived from one), everything else is treated
as a constant. Works for float32 and float64 alike; the finite-difference
oracles in the tests run the whole stack in float64.
"""

from __future__ import annotations

import numpy as np

from . import kernels


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_vjp")

    def __init__(self, data, requires_grad=False, parents=(), vjp=None):
        self.data = data
        self.grad = None
        self.requires_grad = requires_grad or any(p.requires_grad for p in parents)
        self._parents = parents if self.requires_grad else ()
        self._vjp = vjp if self.requires_grad else None

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, grad={self.requires_grad})"


def constant(x) -> Tensor:
    return Tensor(np.asarray(x))


def parameter(x) -> Tensor:
    return Tensor(np.asarray(x), requires_grad=True)


def backward(out: Tensor, seed_grad=None) -> None:
    """Reverse pass from ``out``; accumulates into ``.grad`` of reachable
    parameters."""
    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(out, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            topo.append(node)
            continue
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen and p.requires_grad:
                stack.append((p, False))

    if seed_grad is None:
        seed_grad = np.ones_like(out.data)
    out.grad = seed_grad
    for node in reversed(topo):
        if node._vjp is None or node.grad is None:
            continue
        for p, g in zip(node._parents, node._vjp(node.grad)):
            if g is None or not p.requires_grad:
                continue
            p.grad = g if p.grad is None else p.grad + g


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def add(a: Tensor, b: Tensor) -> Tensor:
    data = a.data + b.data

    def vjp(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return Tensor(data, parents=(a, b), vjp=vjp)


def mul(a: Tensor, b: Tensor) -> Tensor:
    data = a.data * b.data

    def vjp(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return Tensor(data, parents=(a, b), vjp=vjp)


def scale(a: Tensor, s: float) -> Tensor:
    data = a.data * a.data.dtype.type(s)

    def vjp(g):
        return (g * a.data.dtype.type(s),)

    return Tensor(data, parents=(a,), vjp=vjp)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matmul; leading dims of the operands must match exactly."""
    if a.data.shape[:-2] != b.data.shape[:-2]:
        raise ValueError("matmul operands must share leading dimensions")
    data = a.data @ b.data

    def vjp(g):
        return (
            g @ np.swapaxes(b.data, -1, -2),
            np.swapaxes(a.data, -1, -2) @ g,
        )

    return Tensor(data, parents=(a, b), vjp=vjp)


def linear(x: Tensor, w: Tensor, b: Tensor | None = None) -> Tensor:
    """x @ w + b over the last axis; x is (..., in), w is (in, out)."""
    in_dim = w.data.shape[0]
    x2 = x.data.reshape(-1, in_dim)
    y2 = x2 @ w.data
    if b is not None:
        y2 = y2 + b.data
    data = y2.reshape(x.data.shape[:-1] + (w.data.shape[1],))

    def vjp(g):
        g2 = g.reshape(-1, w.data.shape[1])
        gx = (g2 @ w.data.T).reshape(x.data.shape)
        gw = x2.T @ g2
        gb = g2.sum(axis=0) if b is not None else None
        return (gx, gw, gb) if b is not None else (gx, gw)

    parents = (x, w, b) if b is not None else (x, w)
    return Tensor(data, parents=parents, vjp=vjp)


def reshape(x: Tensor, shape) -> Tensor:
    data = x.data.reshape(shape)

    def vjp(g):
        return (g.reshape(x.data.shape),)

    return Tensor(data, parents=(x,), vjp=vjp)


def swapaxes(x: Tensor, a: int, b: int) -> Tensor:
    data = np.swapaxes(x.data, a, b)

    def vjp(g):
        return (np.swapaxes(g, a, b),)

    return Tensor(data, parents=(x,), vjp=vjp)


def concat(tensors, axis: int) -> Tensor:
    data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def vjp(g):
        return tuple(
            np.take(g, range(bounds[i], bounds[i + 1]), axis=axis)
            for i in range(len(tensors))
        )

    return Tensor(data, parents=tuple(tensors), vjp=vjp)


def take(x: Tensor, index, axis: int) -> Tensor:
    """Static slice along one axis (contiguous range)."""
    sl = [slice(None)] * x.data.ndim
    sl[axis] = index
    sl = tuple(sl)
    data = x.data[sl]

    def vjp(g):
        gx = np.zeros_like(x.data)
        gx[sl] = g
        return (gx,)

    return Tensor(data, parents=(x,), vjp=vjp)


def expand_time(x: Tensor, n: int) -> Tensor:
    """(B, C) -> (B, n, C) by repetition; gradient sums over the new axis."""
    data = np.broadcast_to(x.data[:, None, :], (x.data.shape[0], n, x.data.shape[1]))

    def vjp(g):
        return (g.sum(axis=1),)

    return Tensor(np.ascontiguousarray(data), parents=(x,), vjp=vjp)


def gelu(x: Tensor) -> Tensor:
    data, cdf = kernels.gelu_fwd(x.data)

    def vjp(g):
        return (kernels.gelu_bwd(x.data, cdf, g),)

    return Tensor(data, parents=(x,), vjp=vjp)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    cols = x.data.shape[-1]
    x2 = np.ascontiguousarray(x.data.reshape(-1, cols))
    y2, mean, rstd = kernels.layer_norm_fwd(x2, gamma.data, beta.data, eps)

    def vjp(g):
        g2 = np.ascontiguousarray(g.reshape(-1, cols))
        gx, ggamma, gbeta = kernels.layer_norm_bwd(g2, x2, mean, rstd, gamma.data)
        return gx.reshape(x.data.shape), ggamma, gbeta

    return Tensor(y2.reshape(x.data.shape), parents=(x, gamma, beta), vjp=vjp)


def softmax_masked(scores: Tensor, key_mask: np.ndarray) -> Tensor:
    """Softmax over the last axis of (B, H, Q, K) with a (B, K) key mask.

    Masked keys get exactly zero probability; fully-masked rows come back
    all-zero (the attention convention for "no valid keys").
    """
    mask8 = np.ascontiguousarray(key_mask.astype(np.uint8))
    probs = kernels.attn_softmax_fwd(np.ascontiguousarray(scores.data), mask8)

    def vjp(g):
        return (kernels.softmax_bwd(probs, np.ascontiguousarray(g)),)

    return Tensor(probs, parents=(scores,), vjp=vjp)


def masked_max_time(x: Tensor, frame_mask: np.ndarray) -> Tensor:
    """Masked max over axis 1 of (B, N, C); ties route to the lowest index."""
    if not frame_mask.any(axis=1).all():
        raise ValueError("masked max over an all-padding sequence")
    mask8 = np.ascontiguousarray(frame_mask.astype(np.uint8))
    y, idx = kernels.masked_max_fwd(np.ascontiguousarray(x.data), mask8)

    def vjp(g):
        return (kernels.masked_max_bwd(np.ascontiguousarray(g), idx, x.data.shape[1]),)

    return Tensor(y, parents=(x,), vjp=vjp)


def conv1d_same(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Temporal conv with zero same-padding; x (B, N, C), w (K, C, Cout)."""
    bsz, n, c = x.data.shape
    k, _, cout = w.data.shape
    half = k // 2
    pad = np.zeros((bsz, n + 2 * half, c), dtype=x.data.dtype)
    pad[:, half : half + n] = x.data
    cols = np.stack([pad[:, i : i + n] for i in range(k)], axis=2)  # (B,N,K,C)
    cols2 = cols.reshape(bsz * n, k * c)
    wflat = w.data.reshape(k * c, cout)
    y = (cols2 @ wflat + b.data).reshape(bsz, n, cout)

    def vjp(g):
        g2 = g.reshape(bsz * n, cout)
        gw = (cols2.T @ g2).reshape(k, c, cout)
        gb = g2.sum(axis=0)
        gcols = (g2 @ wflat.T).reshape(bsz, n, k, c)
        gpad = np.zeros_like(pad)
        for i in range(k):
            gpad[:, i : i + n] += gcols[:, :, i]
        return gpad[:, half : half + n], gw, gb

    return Tensor(y, parents=(x, w, b), vjp=vjp)


def masked_frame_mse(pred: Tensor, target: np.ndarray, frame_mask: np.ndarray) -> Tensor:
    """Mean over real frames of the squared frame error (summed over
    channels); the training objective."""
    maskf = frame_mask.astype(pred.data.dtype)[:, :, None]
    diff = (pred.data - target) * maskf
    denom = pred.data.dtype.type(max(float(frame_mask.sum()), 1.0))
    data = np.array(np.sum(diff * diff) / denom, dtype=pred.data.dtype)

    def vjp(g):
        return (g * 2.0 * diff / denom,)

    return Tensor(data, parents=(pred,), vjp=vjp)

"""Named parameter store backed by one flat buffer.

Tensors handed out by ``add`` become views into the flat buffer once
``freeze`` runs, so the optimizer and EMA can work on a single contiguous
array while the graph keeps using the named tensors.
"""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, parameter


class ParamStore:
    def __init__(self, dtype=np.float32):
        self.dtype = np.dtype(dtype)
        self._order: list = []
        self._tensors: dict = {}
        self._offsets: dict = {}
        self._flat: np.ndarray | None = None

    def add(self, name: str, array) -> Tensor:
        if self._flat is not None:
            raise RuntimeError("store is frozen")
        if name in self._tensors:
            raise ValueError(f"duplicate parameter {name}")
        t = parameter(np.asarray(array, dtype=self.dtype))
        self._order.append(name)
        self._tensors[name] = t
        return t

    def freeze(self) -> None:
        total = sum(self._tensors[n].data.size for n in self._order)
        flat = np.empty(total, dtype=self.dtype)
        offset = 0
        for name in self._order:
            t = self._tensors[name]
            size = t.data.size
            flat[offset : offset + size] = t.data.ravel()
            t.data = flat[offset : offset + size].reshape(t.data.shape)
            self._offsets[name] = offset
            offset += size
        self._flat = flat

    @property
    def flat(self) -> np.ndarray:
        if self._flat is None:
            raise RuntimeError("store is not frozen")
        return self._flat

    @property
    def n_params(self) -> int:
        return sum(self._tensors[n].data.size for n in self._order)

    def names(self) -> list:
        return list(self._order)

    def tensor(self, name: str) -> Tensor:
        return self._tensors[name]

    def shapes(self) -> list:
        return [(n, tuple(self._tensors[n].data.shape)) for n in self._order]

    def zero_grad(self) -> None:
        for name in self._order:
            self._tensors[name].grad = None

    def gather_grads(self, out: np.ndarray | None = None) -> np.ndarray:
        """Flatten per-tensor grads (zeros where a tensor got none)."""
        if out is None:
            out = np.zeros(self.n_params, dtype=self.dtype)
        for name in self._order:
            t = self._tensors[name]
            off = self._offsets[name]
            size = t.data.size
            if t.grad is None:
                out[off : off + size] = 0.0
            else:
                out[off : off + size] = t.grad.ravel()
        return out

    def load_flat(self, vec: np.ndarray) -> None:
        flat = self.flat
        if vec.size != flat.size:
            raise ValueError(f"expected {flat.size} values, got {vec.size}")
        flat[:] = vec.astype(self.dtype, copy=False)

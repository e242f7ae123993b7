"""Backend selection for the hot kernels.

Set SEMBOOST_BACKEND=numpy to force the pure-numpy lane, =numba to require
the jitted lane (ImportError if numba is missing). Default is numba when
importable, numpy otherwise. ``benchmarks/bench_kernels.py`` compares the
two lanes.
"""

from __future__ import annotations

import os

from . import numpy_impl

_requested = os.environ.get("SEMBOOST_BACKEND", "auto").strip().lower()

if _requested == "numpy":
    _impl = numpy_impl
    BACKEND = "numpy"
elif _requested == "numba":
    from . import numba_impl as _impl

    BACKEND = "numba"
elif _requested in ("", "auto"):
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        _impl = numpy_impl
        BACKEND = "numpy"
else:
    raise ValueError(
        f"SEMBOOST_BACKEND must be 'numba', 'numpy' or 'auto', got {_requested!r}"
    )


def backend() -> str:
    """Name of the active kernel lane."""
    return BACKEND


attn_softmax_fwd = _impl.attn_softmax_fwd
softmax_bwd = _impl.softmax_bwd
layer_norm_fwd = _impl.layer_norm_fwd
layer_norm_bwd = _impl.layer_norm_bwd
gelu_fwd = _impl.gelu_fwd
gelu_bwd = _impl.gelu_bwd
masked_max_fwd = _impl.masked_max_fwd
masked_max_bwd = _impl.masked_max_bwd
adamw_update = _impl.adamw_update
ema_update = _impl.ema_update

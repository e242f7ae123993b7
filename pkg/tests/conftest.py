import numpy as np
import pytest

from semboost.net import Denoiser, DenoiserConfig
from semboost.synth import make_corpus


@pytest.fixture(scope="session")
def small_corpus():
    """Twenty seeded clips shared by codec/semantics/metric tests."""
    return make_corpus(20, seed=42)


@pytest.fixture(scope="session")
def tiny_model_factory():
    """Small float64 models for gradient checks."""

    def build(seed=0, zero_final=False, **overrides):
        cfg = DenoiserConfig(
            **{
                "feature_dim": 9,
                "width": 32,
                "ff_width": 64,
                "heads": 4,
                "defe_layers": 1,
                "sad_layers": 1,
                "conv_layers": 2,
                "max_frames": 8,
                "t_embed_width": 16,
                "text_width": 12,
                **overrides,
            }
        )
        return Denoiser(cfg, seed=seed, dtype=np.float64, zero_final=zero_final)

    return build


def finite_difference(loss_fn, flat: np.ndarray, indices, h: float = 1e-5):
    """Central-difference gradient of loss_fn() w.r.t. flat[indices]."""
    grads = np.zeros(len(indices))
    for n, i in enumerate(indices):
        old = flat[i]
        flat[i] = old + h
        lp = loss_fn()
        flat[i] = old - h
        lm = loss_fn()
        flat[i] = old
        grads[n] = (lp - lm) / (2.0 * h)
    return grads


def relative_errors(analytic: np.ndarray, numeric: np.ndarray, floor: float = 3e-6):
    """Elementwise |a-b| / max(|a|, |b|, floor).

    The floor keeps exactly-zero gradients (masked paths) from amplifying
    the ~1e-10 noise floor of central differences into spurious failures.
    """
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / denom

"""Ancestral sampling with classifier-free guidance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..motion.layout import RepresentationLayout
from ..motion.types import MotionSequence
from ..textembed import TextCondition, null_condition
from .schedule import NoiseSchedule
from .training import DataStats, stack_conditions


@dataclass(frozen=True)
class SamplerConfig:
    guidance_scale: float = 2.5
    num_steps: int | None = None  # None = every schedule step
    seed: int = 0

    def __post_init__(self):
        if self.guidance_scale < 0:
            raise ValueError("guidance scale must be >= 0")
        if self.num_steps is not None and self.num_steps < 1:
            raise ValueError("num_steps must be >= 1")


def guided_predict(model, x_t, t, sentence, words, word_mask, scale,
                   frame_mask=None):
    """x0_hat = uncond + scale * (cond - uncond), two forward passes.

    scale 0 and 1 return the unconditional / conditional branch directly, so
    those identities hold bitwise (and skip the unused pass).
    """
    b = x_t.shape[0]
    if scale != 0.0:
        cond_out = model.forward_batch(x_t, t, sentence, words, word_mask, frame_mask)
        if scale == 1.0:
            return cond_out
    null = null_condition()
    sent0, words0, mask0 = stack_conditions([null] * b, dtype=x_t.dtype)
    uncond_out = model.forward_batch(x_t, t, sent0, words0, mask0, frame_mask)
    if scale == 0.0:
        return uncond_out
    return uncond_out + scale * (cond_out - uncond_out)


def reverse_timesteps(total_steps: int, num_steps: int | None) -> list:
    """Descending timesteps T..1, strided evenly when num_steps < T."""
    if num_steps is None or num_steps >= total_steps:
        return list(range(total_steps, 0, -1))
    ts = np.unique(np.round(np.linspace(total_steps, 1, num_steps)).astype(int))
    return list(ts[::-1])


def sample_batch(
    model,
    conditions,
    n_frames: int,
    schedule: NoiseSchedule,
    cfg: SamplerConfig,
    stats: DataStats,
    layout: RepresentationLayout,
    fps: float = 20.0,
) -> list:
    """Draw one motion per condition; deterministic given cfg.seed.

    The model runs in normalized feature space; each intermediate clean-
    motion estimate is clamped channel-wise to the training data range. The
    returned sequences are denormalized and their contact channels clipped
    to [0, 1] so they satisfy the type invariants.
    """
    if n_frames > model.config.max_frames:
        raise ValueError(f"{n_frames} frames exceed model max {model.config.max_frames}")
    b = len(conditions)
    d = model.config.feature_dim
    dtype = model.store.dtype
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))

    sent, words, wmask = stack_conditions(conditions, dtype=dtype)
    lo = stats.norm_min.astype(dtype)
    hi = stats.norm_max.astype(dtype)

    x = rng.standard_normal((b, n_frames, d)).astype(dtype)
    steps = reverse_timesteps(schedule.total_steps, cfg.num_steps)
    for i, t_cur in enumerate(steps):
        t_prev = steps[i + 1] if i + 1 < len(steps) else 0
        t_vec = np.full(b, t_cur)
        x0_hat = guided_predict(model, x, t_vec, sent, words, wmask,
                                cfg.guidance_scale)
        x0_hat = np.clip(x0_hat, lo, hi)
        coef_x0, coef_xt, var = schedule.posterior_coeffs(t_cur, t_prev)
        mean = dtype.type(coef_x0) * x0_hat + dtype.type(coef_xt) * x
        if t_prev > 0:
            noise = rng.standard_normal(x.shape).astype(dtype)
            x = mean + dtype.type(np.sqrt(var)) * noise
        else:
            x = mean

    out = []
    contacts = layout.contacts_slice
    for row in range(b):
        frames = stats.denormalize(x[row].astype(np.float64))
        frames[:, contacts] = np.clip(frames[:, contacts], 0.0, 1.0)
        out.append(MotionSequence(frames=frames, fps=fps, layout=layout))
    return out


def sample(
    model,
    condition: TextCondition,
    n_frames: int,
    schedule: NoiseSchedule,
    cfg: SamplerConfig,
    stats: DataStats,
    layout: RepresentationLayout,
    fps: float = 20.0,
) -> MotionSequence:
    """Single-condition convenience wrapper around sample_batch."""
    return sample_batch(model, [condition], n_frames, schedule, cfg, stats,
                        layout, fps=fps)[0]

"""Cosine noise schedule and the forward noising process."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COSINE_OFFSET = 0.008


@dataclass(frozen=True)
class NoiseSchedule:
    """Cumulative signal fractions alpha_bar[0..T] with alpha_bar[0] = 1."""

    total_steps: int
    alpha_bar: np.ndarray

    def __post_init__(self):
        ab = np.asarray(self.alpha_bar, dtype=float)
        if ab.shape != (self.total_steps + 1,):
            raise ValueError("alpha_bar must have T+1 entries")
        if ab[0] != 1.0:
            raise ValueError("alpha_bar[0] must be exactly 1")
        if not np.all(np.diff(ab) < 0.0):
            raise ValueError("alpha_bar must decrease strictly")
        if ab[-1] >= 1e-3:
            raise ValueError("alpha_bar[T] must fall below 1e-3")
        object.__setattr__(self, "alpha_bar", ab)

    @property
    def betas(self) -> np.ndarray:
        """Per-step noise rates beta[1..T] (index 0 is a placeholder zero)."""
        out = np.zeros(self.total_steps + 1)
        out[1:] = 1.0 - self.alpha_bar[1:] / self.alpha_bar[:-1]
        return out

    def posterior_coeffs(self, t_cur: int, t_prev: int):
        """Coefficients (on x0_hat, on x_t) and variance of q(x_prev | x_t, x0).

        Works for consecutive steps and for strided (respaced) reverse
        chains; at t_prev == 0 the mean collapses onto x0_hat with zero
        variance.
        """
        ab_cur = self.alpha_bar[t_cur]
        ab_prev = self.alpha_bar[t_prev]
        beta_eff = 1.0 - ab_cur / ab_prev
        denom = 1.0 - ab_cur
        coef_x0 = np.sqrt(ab_prev) * beta_eff / denom
        coef_xt = np.sqrt(ab_cur / ab_prev) * (1.0 - ab_prev) / denom
        var = beta_eff * (1.0 - ab_prev) / denom
        return coef_x0, coef_xt, var


def cosine_schedule(total_steps: int, offset: float = COSINE_OFFSET) -> NoiseSchedule:
    """Cosine schedule: f(t) = cos^2(((t/T + s)/(1 + s)) * pi/2).

    Per-step rates come from consecutive f ratios capped at 0.999 (the final
    raw ratios round to 1 in floating point), and alpha_bar is their running
    product, so every beta stays strictly inside (0, 1).
    """
    if total_steps < 1:
        raise ValueError("need at least one step")
    t = np.arange(total_steps + 1, dtype=float)
    f = np.cos(((t / total_steps + offset) / (1.0 + offset)) * np.pi / 2.0) ** 2
    betas = np.minimum(1.0 - f[1:] / f[:-1], 0.999)
    alpha_bar = np.empty(total_steps + 1)
    alpha_bar[0] = 1.0
    alpha_bar[1:] = np.cumprod(1.0 - betas)
    return NoiseSchedule(total_steps=total_steps, alpha_bar=alpha_bar)


def q_sample(x0: np.ndarray, t, eps: np.ndarray, schedule: NoiseSchedule) -> np.ndarray:
    """Noised sample sqrt(ab_t) x0 + sqrt(1 - ab_t) eps; t scalar or (B,)."""
    x0 = np.asarray(x0)
    eps = np.asarray(eps)
    if eps.shape != x0.shape:
        raise ValueError("noise must match x0's shape")
    ab = schedule.alpha_bar[np.asarray(t)]
    extra = x0.ndim - np.ndim(ab)
    ab = np.reshape(ab, np.shape(ab) + (1,) * extra)
    return np.sqrt(ab).astype(x0.dtype) * x0 + np.sqrt(1.0 - ab).astype(x0.dtype) * eps

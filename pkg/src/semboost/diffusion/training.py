"""Training loop: AdamW on the flat parameter buffer, warmup + cyclic
cosine learning rate, EMA shadow weights and classifier-free condition
dropout."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import autodiff as ad
from .. import kernels
from ..motion.types import MotionSequence
from ..textembed import EMBED_DIM, MAX_WORDS, TextCondition
from .schedule import NoiseSchedule, q_sample

STD_FLOOR = 1e-3


@dataclass(frozen=True)
class TrainConfig:
    base_lr: float = 1e-4
    adam_betas: tuple = (0.9, 0.999)
    adam_eps: float = 1e-8
    weight_decay: float = 0.0
    warmup_iters: int = 1000
    lr_cycle: int = 50_000
    ema_decay: float = 0.995
    cond_dropout: float = 0.1
    batch_size: int = 32
    total_steps: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.base_lr <= 0:
            raise ValueError("base_lr must be positive")
        if not 0.0 <= self.cond_dropout < 1.0:
            raise ValueError("cond_dropout must lie in [0, 1)")
        if not 0.0 <= self.ema_decay <= 1.0:
            raise ValueError("ema_decay must lie in [0, 1]")


def lr_at(step: int, cfg: TrainConfig) -> float:
    """1-indexed step: linear warmup, then a cosine restarted every cycle."""
    if step <= cfg.warmup_iters:
        return cfg.base_lr * step / cfg.warmup_iters
    phase = ((step - cfg.warmup_iters - 1) % cfg.lr_cycle) / cfg.lr_cycle
    return cfg.base_lr * 0.5 * (1.0 + math.cos(math.pi * phase))


class AdamW:
    def __init__(self, n_params: int, cfg: TrainConfig, dtype=np.float32):
        self.beta1, self.beta2 = cfg.adam_betas
        self.eps = cfg.adam_eps
        self.weight_decay = cfg.weight_decay
        self.m = np.zeros(n_params, dtype=dtype)
        self.v = np.zeros(n_params, dtype=dtype)
        self.steps = 0

    def update(self, params: np.ndarray, grads: np.ndarray, lr: float) -> None:
        self.steps += 1
        bc1 = 1.0 - self.beta1**self.steps
        bc2 = 1.0 - self.beta2**self.steps
        kernels.adamw_update(
            params, grads, self.m, self.v,
            lr, self.beta1, self.beta2, self.eps, self.weight_decay, bc1, bc2,
        )


class EmaTracker:
    def __init__(self, params: np.ndarray, decay: float):
        self.decay = decay
        self.shadow = params.copy()

    def update(self, params: np.ndarray) -> None:
        kernels.ema_update(self.shadow, params, self.decay)


@dataclass(frozen=True)
class DataStats:
    """Per-channel statistics of the training motions (raw feature space)."""

    mean: np.ndarray
    std: np.ndarray
    vmin: np.ndarray
    vmax: np.ndarray

    def normalize(self, frames: np.ndarray) -> np.ndarray:
        return (frames - self.mean) / self.std

    def denormalize(self, frames: np.ndarray) -> np.ndarray:
        return frames * self.std + self.mean

    @property
    def norm_min(self) -> np.ndarray:
        return (self.vmin - self.mean) / self.std

    @property
    def norm_max(self) -> np.ndarray:
        return (self.vmax - self.mean) / self.std


class MotionTextDataset:
    """Paired motions (raw feature arrays) and text conditions."""

    def __init__(self, motions, conditions, ids=None):
        if len(motions) != len(conditions):
            raise ValueError("motions and conditions must pair up")
        self.motions = [np.asarray(m, dtype=np.float64) for m in motions]
        self.conditions = list(conditions)
        self.ids = list(ids) if ids is not None else [str(i) for i in range(len(motions))]

    def __len__(self):
        return len(self.motions)

    @classmethod
    def from_pairs(cls, pairs, embedder, ids=None):
        """pairs of (MotionSequence | array, caption text)."""
        motions, conds = [], []
        for motion, caption in pairs:
            frames = motion.frames if isinstance(motion, MotionSequence) else motion
            motions.append(frames)
            conds.append(embedder.embed(caption))
        return cls(motions, conds, ids=ids)

    def compute_stats(self) -> DataStats:
        stacked = np.concatenate(self.motions, axis=0)
        std = np.maximum(stacked.std(axis=0), STD_FLOOR)
        return DataStats(
            mean=stacked.mean(axis=0),
            std=std,
            vmin=stacked.min(axis=0),
            vmax=stacked.max(axis=0),
        )

    def max_len(self) -> int:
        return max(m.shape[0] for m in self.motions)


def stack_conditions(conds, dtype=np.float32):
    sent = np.stack([c.sentence for c in conds]).astype(dtype)
    words = np.stack([c.words for c in conds]).astype(dtype)
    mask = np.stack([c.mask for c in conds])
    return sent, words, mask


@dataclass
class Batch:
    x0: np.ndarray  # (B, N, D) normalized features
    frame_mask: np.ndarray  # (B, N)
    sentence: np.ndarray  # (B, text_width)
    words: np.ndarray  # (B, K, text_width)
    word_mask: np.ndarray  # (B, K)


def collate(dataset: MotionTextDataset, indices, stats: DataStats, pad_to=None,
            dtype=np.float32, trim_words=True) -> Batch:
    """Pad a batch to its longest clip and trim unused word slots.

    Masking makes both choices output-equivalent to padding everything to
    the model maximum; they just keep the desk-scale training fast.
    """
    motions = [dataset.motions[i] for i in indices]
    conds = [dataset.conditions[i] for i in indices]
    n = pad_to or max(m.shape[0] for m in motions)
    d = motions[0].shape[1]
    x0 = np.zeros((len(motions), n, d), dtype=dtype)
    fmask = np.zeros((len(motions), n), dtype=bool)
    for row, m in enumerate(motions):
        x0[row, : m.shape[0]] = stats.normalize(m)
        fmask[row, : m.shape[0]] = True
    sent, words, wmask = stack_conditions(conds, dtype=dtype)
    if trim_words:
        keep = max(int(np.max(np.sum(wmask, axis=1))), 1)
        words = np.ascontiguousarray(words[:, :keep])
        wmask = np.ascontiguousarray(wmask[:, :keep])
    return Batch(x0=x0, frame_mask=fmask, sentence=sent, words=words, word_mask=wmask)


def null_out_conditions(batch: Batch, drop: np.ndarray) -> Batch:
    """Replace dropped items' conditions with the null (all-zero) one."""
    if not drop.any():
        return batch
    sent = batch.sentence.copy()
    words = batch.words.copy()
    wmask = batch.word_mask.copy()
    sent[drop] = 0.0
    words[drop] = 0.0
    wmask[drop] = False
    return Batch(batch.x0, batch.frame_mask, sent, words, wmask)


class Trainer:
    """Owns the optimizer/EMA state and performs gradient steps."""

    def __init__(self, model, schedule: NoiseSchedule, cfg: TrainConfig,
                 stats: DataStats):
        self.model = model
        self.schedule = schedule
        self.cfg = cfg
        self.stats = stats
        self.opt = AdamW(model.store.flat.size, cfg, dtype=model.store.dtype)
        self.ema = EmaTracker(model.store.flat, cfg.ema_decay)
        self.rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
        self.step_count = 0
        self._grad_buf = np.zeros(model.store.flat.size, dtype=model.store.dtype)

    def draw(self, batch_shape):
        b = batch_shape[0]
        t = self.rng.integers(1, self.schedule.total_steps + 1, size=b)
        eps = self.rng.standard_normal(batch_shape, dtype=self.model.store.dtype)
        drop = self.rng.random(b) < self.cfg.cond_dropout
        return t, eps, drop

    def loss_tensor(self, batch: Batch, t, eps):
        x_t = q_sample(batch.x0, t, eps.astype(batch.x0.dtype), self.schedule)
        pred = self.model.predict_tensor(
            x_t, t, batch.sentence, batch.words, batch.word_mask, batch.frame_mask
        )
        return ad.masked_frame_mse(pred, batch.x0, batch.frame_mask)

    def loss_value(self, batch: Batch, t, eps) -> float:
        return float(self.loss_tensor(batch, t, eps).data)

    def train_step(self, batch: Batch, draws=None) -> float:
        """One optimization step; pass ``draws`` = (t, eps, drop) to fix the
        stochastic choices (used by the loss-decrease tests)."""
        t, eps, drop = draws if draws is not None else self.draw(batch.x0.shape)
        batch = null_out_conditions(batch, drop)
        loss = self.loss_tensor(batch, t, eps)
        value = float(loss.data)
        if not math.isfinite(value):
            raise RuntimeError(
                f"non-finite loss {value} at step {self.step_count + 1}"
            )
        self.model.store.zero_grad()
        ad.backward(loss)
        grads = self.model.store.gather_grads(self._grad_buf)
        self.step_count += 1
        self.opt.update(self.model.store.flat, grads, lr_at(self.step_count, self.cfg))
        self.ema.update(self.model.store.flat)
        return value

    def ema_parameters(self) -> np.ndarray:
        return self.ema.shadow.copy()


def train(model, dataset: MotionTextDataset, schedule: NoiseSchedule,
          cfg: TrainConfig, stats: DataStats | None = None,
          on_step=None):
    """Run the full loop; returns (trainer, losses). ``on_step`` gets
    (step, loss, lr) after every update."""
    stats = stats or dataset.compute_stats()
    trainer = Trainer(model, schedule, cfg, stats)
    losses = []
    n = len(dataset)
    for _ in range(cfg.total_steps):
        idx = trainer.rng.integers(0, n, size=cfg.batch_size)
        batch = collate(dataset, idx, stats, dtype=model.store.dtype)
        loss = trainer.train_step(batch)
        losses.append(loss)
        if on_step is not None:
            on_step(trainer.step_count, loss, lr_at(trainer.step_count, cfg))
    return trainer, losses

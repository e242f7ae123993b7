import math

import numpy as np
import pytest

from semboost.diffusion import (
    EmaTracker,
    MotionTextDataset,
    TrainConfig,
    Trainer,
    cosine_schedule,
    lr_at,
)
from semboost.diffusion.training import Batch, collate, null_out_conditions
from semboost.net import Denoiser, DenoiserConfig, ParamStore
from semboost.textembed import ToyTextEmbedder

RNG = np.random.default_rng(21)


def _toy_dataset(n=12, frames=6, dim=9, seed=100):
    rng = np.random.default_rng(seed)
    emb = ToyTextEmbedder()
    motions = [rng.standard_normal((int(rng.integers(3, frames + 1)), dim)) for _ in range(n)]
    texts = [f"clip number {i} does thing {i % 3}" for i in range(n)]
    return MotionTextDataset.from_pairs(list(zip(motions, texts)), emb)


def _toy_trainer(seed=0, **train_kw):
    cfg = DenoiserConfig(
        feature_dim=9, width=32, ff_width=64, heads=4, defe_layers=1,
        sad_layers=1, conv_layers=2, max_frames=8, t_embed_width=16,
        text_width=512,
    )
    model = Denoiser(cfg, seed=seed)
    ds = _toy_dataset()
    stats = ds.compute_stats()
    tc = TrainConfig(batch_size=4, total_steps=5, seed=seed, **train_kw)
    return Trainer(model, cosine_schedule(50), tc, stats), ds, stats


def test_lr_warmup_is_linear():
    cfg = TrainConfig(base_lr=2e-4, warmup_iters=1000)
    assert lr_at(500, cfg) == pytest.approx(1e-4)
    assert lr_at(1, cfg) == pytest.approx(2e-4 / 1000)
    assert lr_at(1000, cfg) == pytest.approx(2e-4)


def test_lr_cosine_cycles_after_warmup():
    cfg = TrainConfig(base_lr=1e-4, warmup_iters=100, lr_cycle=1000)
    assert lr_at(101, cfg) == pytest.approx(1e-4, rel=1e-4)
    mid = lr_at(101 + 500, cfg)
    assert mid == pytest.approx(1e-4 * 0.5 * (1 + math.cos(math.pi * 0.5)), rel=1e-6)
    # restart at the cycle boundary
    assert lr_at(101 + 1000, cfg) == pytest.approx(1e-4, rel=1e-4)
    low = lr_at(100 + 1000, cfg)
    assert low < 2e-9


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(base_lr=0.0)
    with pytest.raises(ValueError):
        TrainConfig(cond_dropout=1.0)
    with pytest.raises(ValueError):
        TrainConfig(ema_decay=1.5)


def test_ema_decay_zero_tracks_parameters():
    params = RNG.standard_normal(50).astype(np.float32)
    ema = EmaTracker(np.zeros(50, dtype=np.float32), decay=0.0)
    ema.update(params)
    np.testing.assert_allclose(ema.shadow, params, atol=1e-7)


def test_ema_converges_when_training_frozen():
    params = RNG.standard_normal(20).astype(np.float32)
    ema = EmaTracker(RNG.standard_normal(20).astype(np.float32), decay=0.9)
    for _ in range(400):
        ema.update(params)
    np.testing.assert_allclose(ema.shadow, params, atol=1e-5)


class _IdentityOracle:
    """Stand-in network that always returns the clean batch."""

    def __init__(self, x0):
        self.store = ParamStore()
        self.store.freeze()
        self._x0 = x0

    def predict_tensor(self, x, t, sentence, words, word_mask, frame_mask=None):
        from semboost import autodiff as ad

        return ad.constant(self._x0)


def test_identity_oracle_gives_zero_loss():
    ds = _toy_dataset()
    stats = ds.compute_stats()
    batch = collate(ds, [0, 1, 2, 3], stats)
    oracle = _IdentityOracle(batch.x0)
    trainer = Trainer(oracle, cosine_schedule(50), TrainConfig(batch_size=4), stats)
    loss = trainer.train_step(batch)
    assert loss == 0.0


def test_loss_decreases_on_frozen_batch():
    wins = 0
    seeds = range(20)
    for seed in seeds:
        trainer, ds, stats = _toy_trainer(seed=seed, base_lr=1e-4)
        batch = collate(ds, list(range(4)), stats, dtype=np.float32)
        draws = trainer.draw(batch.x0.shape)
        before = trainer.loss_value(batch, draws[0], draws[1])
        trainer.train_step(batch, draws=draws)
        after = trainer.loss_value(batch, draws[0], draws[1])
        wins += after < before
    assert wins >= 0.95 * len(seeds)


def test_condition_dropout_replaces_with_null():
    trainer, ds, stats = _toy_trainer(cond_dropout=0.5)
    batch = collate(ds, [0, 1, 2, 3], stats)
    drop = np.array([True, False, True, False])
    nulled = null_out_conditions(batch, drop)
    assert np.all(nulled.sentence[drop] == 0.0)
    assert np.all(nulled.words[drop] == 0.0)
    assert not nulled.word_mask[drop].any()
    np.testing.assert_array_equal(nulled.sentence[~drop], batch.sentence[~drop])
    assert nulled.word_mask[~drop].any()


def test_dropout_rate_is_respected_statistically():
    trainer, _, _ = _toy_trainer(cond_dropout=0.25)
    draws = [trainer.draw((8, 4, 9))[2].mean() for _ in range(400)]
    assert abs(np.mean(draws) - 0.25) < 0.03


def test_non_finite_loss_aborts():
    trainer, ds, stats = _toy_trainer()
    batch = collate(ds, [0, 1, 2, 3], stats)
    bad = Batch(
        x0=batch.x0 * np.nan,
        frame_mask=batch.frame_mask,
        sentence=batch.sentence,
        words=batch.words,
        word_mask=batch.word_mask,
    )
    with pytest.raises(RuntimeError, match="non-finite"):
        trainer.train_step(bad)


def test_collate_pads_and_masks():
    ds = _toy_dataset()
    stats = ds.compute_stats()
    batch = collate(ds, [0, 1, 2], stats)
    lengths = [ds.motions[i].shape[0] for i in [0, 1, 2]]
    assert batch.x0.shape[1] == max(lengths)
    for row, n in enumerate(lengths):
        assert batch.frame_mask[row, :n].all()
        assert not batch.frame_mask[row, n:].any()
        assert np.all(batch.x0[row, n:] == 0.0)
    # word slots trimmed to the longest caption in the batch
    assert batch.words.shape[1] == batch.word_mask.sum(axis=1).max()


def test_trainer_reproducibility():
    results = []
    for _ in range(2):
        trainer, ds, stats = _toy_trainer(seed=3)
        losses = []
        for _ in range(3):
            idx = trainer.rng.integers(0, len(ds), size=4)
            losses.append(trainer.train_step(collate(ds, idx, stats)))
        results.append(losses)
    assert results[0] == results[1]


def test_dataset_stats_floor_std():
    ds = MotionTextDataset(
        [np.zeros((4, 5)), np.zeros((3, 5))],
        [ToyTextEmbedder().embed("x"), ToyTextEmbedder().embed("y")],
    )
    stats = ds.compute_stats()
    assert np.all(stats.std >= 1e-3)
    np.testing.assert_array_equal(stats.normalize(np.zeros((2, 5))), 0.0)

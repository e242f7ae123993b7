import numpy as np
import pytest

from semboost.diffusion import (
    SamplerConfig,
    cosine_schedule,
    guided_predict,
    sample,
    sample_batch,
)
from semboost.diffusion.sampling import reverse_timesteps
from semboost.diffusion.training import DataStats
from semboost.motion import layout_269
from semboost.net import Denoiser, DenoiserConfig
from semboost.textembed import ToyTextEmbedder, null_condition

RNG = np.random.default_rng(31)
LAYOUT = layout_269()


def _stats(dim=269):
    return DataStats(
        mean=np.zeros(dim), std=np.ones(dim),
        vmin=-3 * np.ones(dim), vmax=3 * np.ones(dim),
    )


def _small_model():
    cfg = DenoiserConfig(
        feature_dim=269, width=32, ff_width=64, heads=4, defe_layers=1,
        sad_layers=1, conv_layers=2, max_frames=16, t_embed_width=16,
        text_width=512,
    )
    # random output head: a zero-initialized one would predict all zeros and
    # make every sample identically zero
    return Denoiser(cfg, seed=0, zero_final=False)


class _FixedOracle:
    """Model stub that always predicts the same clean motion."""

    def __init__(self, target, cfg):
        self.target = target
        self.config = cfg
        self.store = type("S", (), {"dtype": np.dtype(np.float32)})()

    def forward_batch(self, x, t, sentence, words, word_mask, frame_mask=None):
        return np.broadcast_to(self.target, x.shape).astype(x.dtype)


def test_reverse_timesteps_full_and_respaced():
    assert reverse_timesteps(5, None) == [5, 4, 3, 2, 1]
    assert reverse_timesteps(5, 99) == [5, 4, 3, 2, 1]
    respaced = reverse_timesteps(1000, 10)
    assert respaced[0] == 1000 and respaced[-1] == 1
    assert len(respaced) == 10
    assert all(a > b for a, b in zip(respaced, respaced[1:]))


def test_guidance_scale_identities():
    model = _small_model()
    cond = ToyTextEmbedder().embed("a person walks east")
    x = RNG.standard_normal((2, 6, 269)).astype(np.float32)
    t = np.array([40, 40])
    sent = np.stack([cond.sentence] * 2).astype(np.float32)
    words = np.stack([cond.words] * 2).astype(np.float32)
    wmask = np.stack([cond.mask] * 2)

    cond_out = model.forward_batch(x, t, sent, words, wmask)
    null = null_condition()
    sent0 = np.stack([null.sentence] * 2).astype(np.float32)
    words0 = np.stack([null.words] * 2).astype(np.float32)
    mask0 = np.stack([null.mask] * 2)
    uncond_out = model.forward_batch(x, t, sent0, words0, mask0)

    s1 = guided_predict(model, x, t, sent, words, wmask, 1.0)
    assert np.array_equal(s1, cond_out)  # bitwise
    s0 = guided_predict(model, x, t, sent, words, wmask, 0.0)
    assert np.array_equal(s0, uncond_out)  # bitwise
    s25 = guided_predict(model, x, t, sent, words, wmask, 2.5)
    np.testing.assert_allclose(
        s25, uncond_out + 2.5 * (cond_out - uncond_out), atol=1e-5
    )


def test_null_condition_makes_guidance_scale_irrelevant():
    model = _small_model()
    null = null_condition()
    x = RNG.standard_normal((1, 5, 269)).astype(np.float32)
    t = np.array([11])
    outs = [
        guided_predict(
            model, x, t,
            null.sentence[None].astype(np.float32),
            null.words[None].astype(np.float32),
            null.mask[None], s,
        )
        for s in (0.0, 1.0, 2.5, 7.0)
    ]
    for other in outs[1:]:
        np.testing.assert_allclose(outs[0], other, atol=1e-5)


def test_sampler_determinism_and_shape():
    model = _small_model()
    cond = ToyTextEmbedder().embed("a person walks")
    cfg = SamplerConfig(guidance_scale=2.5, num_steps=8, seed=7)
    sched = cosine_schedule(50)
    a = sample(model, cond, 12, sched, cfg, _stats(), LAYOUT)
    b = sample(model, cond, 12, sched, cfg, _stats(), LAYOUT)
    assert a.frames.shape == (12, 269)
    assert np.array_equal(a.frames, b.frames)
    c = sample(model, cond, 12, sched, SamplerConfig(2.5, 8, seed=8), _stats(), LAYOUT)
    assert not np.array_equal(a.frames, c.frames)


def test_sampler_outputs_satisfy_invariants():
    model = _small_model()
    cond = ToyTextEmbedder().embed("a person stands")
    sched = cosine_schedule(50)
    out = sample(model, cond, 10, sched, SamplerConfig(0.0, 10, 3), _stats(), LAYOUT)
    out.validate()  # finite values, contacts inside [0, 1]


def test_oracle_model_reaches_its_fixed_point():
    # keep the target inside the clamp range so it is a true fixed point
    target = RNG.uniform(-2.0, 2.0, size=(1, 6, 269)).astype(np.float32)
    oracle = _FixedOracle(target, DenoiserConfig(feature_dim=269, max_frames=16))
    sched = cosine_schedule(100)
    stats = _stats()
    cfg = SamplerConfig(guidance_scale=0.0, num_steps=None, seed=5)
    out = sample_batch(oracle, [null_condition()], 6, sched, cfg, stats, LAYOUT)[0]
    body = slice(0, LAYOUT.contacts_offset)
    np.testing.assert_allclose(out.frames[:, body], target[0, :, body], atol=1e-4)


def test_clamping_to_training_range():
    big = np.full((1, 4, 269), 50.0, dtype=np.float32)
    oracle = _FixedOracle(big, DenoiserConfig(feature_dim=269, max_frames=8))
    sched = cosine_schedule(30)
    stats = _stats()
    out = sample_batch(
        oracle, [null_condition()], 4, sched,
        SamplerConfig(0.0, None, 2), stats, LAYOUT,
    )[0]
    # x0_hat clamps to the normalized max (3.0) every step
    assert np.max(out.frames[:, :LAYOUT.contacts_offset]) <= 3.0 + 1e-5


def test_frame_budget_enforced():
    model = _small_model()
    cond = ToyTextEmbedder().embed("x")
    with pytest.raises(ValueError, match="max"):
        sample(model, cond, 64, cosine_schedule(10), SamplerConfig(), _stats(), LAYOUT)

import numpy as np
import pytest

from semboost import autodiff as ad
from semboost.net import Denoiser, DenoiserConfig, FrameTokens, param_count
from semboost.net.layers import attention, sinusoidal_embedding
from semboost.textembed import ToyTextEmbedder, null_condition

from conftest import finite_difference, relative_errors

RNG = np.random.default_rng(5)


def _inputs(model, batch=2, frames=6, words=5, pad_frames=0):
    cfg = model.config
    x = RNG.standard_normal((batch, frames, cfg.feature_dim))
    fmask = np.ones((batch, frames), dtype=bool)
    if pad_frames:
        fmask[0, -pad_frames:] = False
        x[0, -pad_frames:] = 0.0
    t = RNG.integers(1, 1000, size=batch)
    sent = RNG.standard_normal((batch, cfg.text_width))
    wvec = RNG.standard_normal((batch, words, cfg.text_width))
    wmask = RNG.random((batch, words)) > 0.3
    wmask[:, 0] = True
    return x, t, sent, wvec, wmask, fmask


def test_output_shape_and_determinism(tiny_model_factory):
    model = tiny_model_factory()
    x, t, sent, words, wmask, fmask = _inputs(model)
    a = model.forward_batch(x, t, sent, words, wmask, fmask)
    b = model.forward_batch(x, t, sent, words, wmask, fmask)
    assert a.shape == x.shape
    assert np.array_equal(a, b)


def test_single_sequence_wrapper(tiny_model_factory):
    model = tiny_model_factory(text_width=512)
    cond = ToyTextEmbedder().embed("a person walks")
    x = RNG.standard_normal((6, model.config.feature_dim))
    out = model.forward(x, 3, cond)
    assert out.shape == x.shape


def test_padding_invariance(tiny_model_factory):
    model = tiny_model_factory()
    x, t, sent, words, wmask, fmask = _inputs(model, batch=2, frames=7, pad_frames=3)
    base = model.forward_batch(x, t, sent, words, wmask, fmask)
    # scribble over padded frames and padded words: real outputs must not move
    x2 = x.copy()
    x2[0, -3:] = RNG.standard_normal((3, model.config.feature_dim)) * 50.0
    words2 = words.copy()
    words2[~wmask] = 99.0
    other = model.forward_batch(x2, t, sent, words2, wmask, fmask)
    np.testing.assert_array_equal(base[0, :4], other[0, :4])
    np.testing.assert_array_equal(base[1], other[1])


def test_shape_validation(tiny_model_factory):
    model = tiny_model_factory()
    x, t, sent, words, wmask, fmask = _inputs(model)
    with pytest.raises(ValueError, match="feature dim"):
        model.forward_batch(x[:, :, :5], t, sent, words, wmask, fmask)
    with pytest.raises(ValueError, match="max_frames"):
        model.forward_batch(
            RNG.standard_normal((2, 64, model.config.feature_dim)),
            t, sent, words, wmask,
        )
    with pytest.raises(ValueError, match=">= 1"):
        model.forward_batch(x, np.zeros(2, dtype=int), sent, words, wmask, fmask)


def test_param_count_formula_tracks_build():
    for kwargs in (
        {},
        {"width": 64, "ff_width": 128, "defe_layers": 2, "sad_layers": 2},
        {"feature_dim": 263, "conv_layers": 2, "t_embed_width": 128, "text_width": 256},
    ):
        cfg = DenoiserConfig(**kwargs)
        model = Denoiser(cfg, seed=0)
        assert model.store.n_params == param_count(cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        DenoiserConfig(width=30, heads=4)
    with pytest.raises(ValueError):
        DenoiserConfig(conv_kernel=2)
    assert DenoiserConfig().total_layers == 8


def test_defe_masking_contract(tiny_model_factory):
    model = tiny_model_factory()
    w = model.config.width
    tokens = RNG.standard_normal((2, 6, w))
    mask = np.ones((2, 6), dtype=bool)
    mask[0, 4:] = False
    tokens[0, 4:] = 0.0
    temb = RNG.standard_normal((2, w))
    out1 = model.defe_encode(FrameTokens(tokens=tokens, mask=mask), temb)
    tokens2 = tokens.copy()
    # FrameTokens enforces zero padding, so perturb after construction
    frames2 = FrameTokens(tokens=tokens2, mask=mask)
    frames2.tokens[0, 4:] = 123.0
    out2 = model.defe_encode(frames2, temb)
    np.testing.assert_array_equal(out1.tokens[0, :4], out2.tokens[0, :4])
    assert out1.tokens.shape == tokens.shape
    assert np.all(out1.tokens[0, 4:] == 0.0)


def test_global_token_is_max_of_constant(tiny_model_factory):
    from semboost import kernels

    model = tiny_model_factory()
    w = model.config.width
    # zero conv weights make the final conv output a constant per channel
    # (gelu of the last bias), so the pooled global token must equal it
    for conv_w, conv_b in model.convs:
        conv_w.data[:] = 0.0
        conv_b.data[:] = 0.0
    last_bias = RNG.standard_normal(w)
    model.convs[-1][1].data[:] = last_bias
    expected, _ = kernels.gelu_fwd(last_bias)

    tokens = RNG.standard_normal((2, 5, w))
    mask = np.ones((2, 5), dtype=bool)
    gt = model.compute_global_token(
        FrameTokens(tokens=tokens, mask=mask), RNG.standard_normal((2, w))
    )
    assert gt.vec.shape == (2, w)
    np.testing.assert_allclose(gt.vec, np.tile(expected, (2, 1)), atol=1e-12)


def test_sad_layer_surface(tiny_model_factory):
    model = tiny_model_factory(text_width=512)
    w = model.config.width
    frames = FrameTokens(
        tokens=RNG.standard_normal((1, 6, w)), mask=np.ones((1, 6), dtype=bool)
    )
    cond_tok = RNG.standard_normal((1, w))
    cond = ToyTextEmbedder().embed("a person walks east")
    out = model.sad_layer(0, frames, cond_tok, cond)
    assert out.tokens.shape == frames.tokens.shape
    # all-masked words: the cross-attention contributes exactly zero, so the
    # layer must behave as if only the self-attention block ran
    out_null = model.sad_layer(0, frames, cond_tok, null_condition())
    assert not np.array_equal(out.tokens, out_null.tokens)


def test_cross_attention_zero_when_all_words_masked(tiny_model_factory):
    model = tiny_model_factory()
    layer = model.sad_blocks[0]
    f = ad.constant(RNG.standard_normal((2, 5, model.config.width)))
    words_h = ad.constant(RNG.standard_normal((2, 4, model.config.width)))
    wmask = np.zeros((2, 4), dtype=bool)
    out = layer.cross(layer.ln_cross(f), words_h, wmask)
    assert np.all(out.data == 0.0)
    some = np.array([[True, False, False, False], [True, True, False, False]])
    out2 = layer.cross(layer.ln_cross(f), words_h, some)
    assert np.any(out2.data != 0.0)


def test_single_word_cross_attention_returns_its_value():
    q = ad.constant(RNG.standard_normal((1, 3, 8)))
    kv = ad.constant(RNG.standard_normal((1, 1, 8)))
    mask = np.ones((1, 1), dtype=bool)
    ctx, probs = attention(q, kv, kv, mask, heads=2)
    np.testing.assert_allclose(probs.data, 1.0, atol=1e-12)
    np.testing.assert_allclose(
        ctx.data, np.broadcast_to(kv.data, ctx.data.shape), atol=1e-12
    )


def test_sinusoidal_embedding_shape_and_range():
    emb = sinusoidal_embedding(np.arange(10), 16)
    assert emb.shape == (10, 16)
    assert np.max(np.abs(emb)) <= 1.0
    odd = sinusoidal_embedding(np.arange(4), 15)
    assert odd.shape == (4, 15)


def test_full_loss_gradcheck_sampled(tiny_model_factory):
    """Every-parameter FD checks live in the acceptance suite; here a random
    sample of parameters guards the graph wiring cheaply."""
    model = tiny_model_factory(zero_final=False)
    x, t, sent, words, wmask, fmask = _inputs(model, batch=2, frames=6, pad_frames=2)
    x0 = RNG.standard_normal(x.shape)

    def loss_value():
        pred = model.predict_tensor(x, t, sent, words, wmask, fmask)
        return float(ad.masked_frame_mse(pred, x0, fmask).data)

    model.store.zero_grad()
    loss = ad.masked_frame_mse(
        model.predict_tensor(x, t, sent, words, wmask, fmask), x0, fmask
    )
    ad.backward(loss)
    analytic = model.store.gather_grads()
    idx = RNG.choice(model.store.flat.size, size=220, replace=False)
    fd = finite_difference(loss_value, model.store.flat, idx)
    rel = relative_errors(analytic[idx], fd)
    assert rel.max() < 1e-4, f"worst rel err {rel.max()}"

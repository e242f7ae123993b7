"""Finite-difference checks of every autodiff op in float64."""

import numpy as np
import pytest

from semboost import autodiff as ad

RNG = np.random.default_rng(11)
H = 1e-5
TOL = 1e-6  # float64 ops should be far better than the 1e-4 contract


def check_op(build, *shapes, n_probe=60):
    """Compare backward() grads of sum(op * probe) against central FD."""
    arrays = [RNG.standard_normal(s) for s in shapes]
    params = [ad.parameter(a.copy()) for a in arrays]
    probe = RNG.standard_normal(build(*params).data.shape)

    def loss_tensors(ps):
        out = build(*ps)
        return float(np.sum(out.data * probe))

    out = build(*params)
    ad.backward(out, seed_grad=probe.copy())

    for pi, param in enumerate(params):
        flat = param.data.reshape(-1)
        grad = np.zeros_like(flat) if param.grad is None else param.grad.reshape(-1)
        idx = RNG.choice(flat.size, size=min(n_probe, flat.size), replace=False)
        for i in idx:
            old = flat[i]
            flat[i] = old + H
            lp = loss_tensors(params)
            flat[i] = old - H
            lm = loss_tensors(params)
            flat[i] = old
            fd = (lp - lm) / (2 * H)
            denom = max(abs(fd), abs(grad[i]), 1e-8)
            assert abs(fd - grad[i]) / denom < TOL, (
                f"op {build.__name__ if hasattr(build, '__name__') else build}"
                f" param {pi} idx {i}: fd={fd} analytic={grad[i]}"
            )


def test_add_broadcast():
    check_op(lambda a, b: ad.add(a, b), (3, 5, 4), (1, 1, 4))


def test_mul_broadcast():
    check_op(lambda a, b: ad.mul(a, b), (2, 6), (2, 1))


def test_scale():
    check_op(lambda a: ad.scale(a, -2.5), (4, 3))


def test_matmul_batched():
    check_op(lambda a, b: ad.matmul(a, b), (2, 3, 4, 5), (2, 3, 5, 6))


def test_matmul_rejects_mismatched_leading():
    a = ad.parameter(RNG.standard_normal((2, 3, 4)))
    b = ad.parameter(RNG.standard_normal((3, 4, 5)))
    with pytest.raises(ValueError):
        ad.matmul(a, b)


def test_linear():
    check_op(lambda x, w, b: ad.linear(x, w, b), (2, 7, 5), (5, 6), (6,))


def test_reshape_swap_concat_take():
    check_op(lambda a: ad.reshape(a, (6, 4)), (2, 3, 4))
    check_op(lambda a: ad.swapaxes(a, 0, 2), (2, 3, 4))
    check_op(lambda a, b: ad.concat([a, b], axis=1), (2, 3, 4), (2, 2, 4))
    check_op(lambda a: ad.take(a, slice(1, 3), axis=1), (2, 5, 3))


def test_expand_time():
    check_op(lambda a: ad.expand_time(a, 7), (3, 4))


def test_gelu():
    check_op(lambda a: ad.gelu(a), (5, 11))


def test_layer_norm():
    check_op(lambda x, g, b: ad.layer_norm(x, g, b), (7, 10), (10,), (10,))


def test_softmax_masked():
    mask = RNG.random((3, 6)) > 0.25
    mask[0, :] = True
    check_op(lambda s: ad.softmax_masked(s, mask), (3, 2, 4, 6))


def test_softmax_rows_are_distributions():
    scores = ad.constant(RNG.standard_normal((2, 2, 5, 9)))
    mask = RNG.random((2, 9)) > 0.4
    mask[:, 0] = True
    probs = ad.softmax_masked(scores, mask).data
    sums = probs.sum(axis=-1)
    np.testing.assert_allclose(sums, 1.0, atol=1e-12)
    assert probs.min() >= 0.0
    assert np.all(probs[:, :, :, ~mask[0]][0] == 0.0)


def test_masked_max_time():
    mask = np.ones((3, 6), dtype=bool)
    mask[1, 4:] = False
    check_op(lambda x: ad.masked_max_time(x, mask), (3, 6, 5))


def test_masked_max_requires_a_real_frame():
    x = ad.constant(np.zeros((1, 3, 2)))
    with pytest.raises(ValueError):
        ad.masked_max_time(x, np.zeros((1, 3), dtype=bool))


def test_conv1d_same():
    check_op(lambda x, w, b: ad.conv1d_same(x, w, b), (2, 9, 4), (3, 4, 5), (5,))


def test_conv1d_same_padding_semantics():
    # kernel [0, 1, 0] must reproduce the input exactly
    x = RNG.standard_normal((1, 6, 2))
    w = np.zeros((3, 2, 2))
    w[1] = np.eye(2)
    out = ad.conv1d_same(ad.constant(x), ad.constant(w), ad.constant(np.zeros(2)))
    np.testing.assert_allclose(out.data, x, atol=1e-14)


def test_masked_frame_mse():
    mask = np.array([[True, True, False], [True, False, False]])
    target = RNG.standard_normal((2, 3, 4))
    check_op(lambda p: ad.masked_frame_mse(p, target, mask), (2, 3, 4))
    # value: mean over the three real frames of the squared frame norms
    pred = RNG.standard_normal((2, 3, 4))
    out = ad.masked_frame_mse(ad.constant(pred), target, mask)
    diff = (pred - target) * mask[:, :, None]
    assert np.isclose(float(out.data), np.sum(diff**2) / 3.0)


def test_gradient_accumulates_over_shared_parameter():
    a = ad.parameter(RNG.standard_normal((3, 3)))
    out = ad.add(ad.mul(a, a), a)  # a appears in several graph positions
    ad.backward(out)
    np.testing.assert_allclose(a.grad, 2 * a.data + 1.0, atol=1e-12)


def test_constants_receive_no_grad():
    a = ad.parameter(RNG.standard_normal(4))
    c = ad.constant(RNG.standard_normal(4))
    out = ad.mul(a, c)
    ad.backward(out)
    assert c.grad is None
    assert a.grad is not None

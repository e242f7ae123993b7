import numpy as np
import pytest

from semboost import geometry


def test_yaw_matrix_turns_north_to_east():
    m = geometry.yaw_matrix(np.pi / 2)
    east = m @ np.array([0.0, 0.0, 1.0])
    assert np.allclose(east, [1.0, 0.0, 0.0], atol=1e-12)


def test_quarter_turns_are_exact():
    for k in range(4):
        q = geometry.quarter_turn_matrix(k)
        assert set(np.unique(q)) <= {-1.0, 0.0, 1.0}
        assert np.array_equal(q @ q.T, np.eye(3))
    q1 = geometry.quarter_turn_matrix(1)
    assert np.array_equal(np.linalg.matrix_power(q1, 4), np.eye(3))


def test_rotate_y_matches_matrix():
    rng = np.random.default_rng(0)
    theta = rng.uniform(-np.pi, np.pi, size=17)
    v = rng.standard_normal((17, 3))
    direct = geometry.rotate_y(theta, v)
    via_matrix = np.einsum("nab,nb->na", geometry.yaw_matrix(theta), v)
    np.testing.assert_allclose(direct, via_matrix, atol=1e-12)


def test_rodrigues_to_z_sends_direction_to_z():
    rng = np.random.default_rng(1)
    r = rng.standard_normal((1000, 3))
    m = geometry.rodrigues_to_z(r)
    rhat = r / np.linalg.norm(r, axis=1, keepdims=True)
    mapped = np.einsum("nab,nb->na", m, rhat)
    assert np.max(np.abs(mapped - [0.0, 0.0, 1.0])) < 1e-9


def test_rodrigues_to_z_orthonormal():
    rng = np.random.default_rng(2)
    m = geometry.rodrigues_to_z(rng.standard_normal((500, 3)))
    eye = np.einsum("nab,ncb->nac", m, m)
    assert np.max(np.abs(eye - np.eye(3))) < 1e-12
    assert np.max(np.abs(np.linalg.det(m) - 1.0)) < 1e-12


def test_rodrigues_parallel_and_antiparallel():
    assert np.allclose(geometry.rodrigues_to_z([0.0, 0.0, 2.0]), np.eye(3))
    flip = geometry.rodrigues_to_z([0.0, 0.0, -3.0])
    assert np.allclose(flip, np.diag([1.0, -1.0, -1.0]))
    assert np.allclose(flip @ [0.0, 0.0, -1.0], [0.0, 0.0, 1.0])


def test_rodrigues_rejects_zero():
    with pytest.raises(geometry.DegenerateRotationError):
        geometry.rodrigues_to_z([0.0, 0.0, 0.0])


def test_cont6d_roundtrip():
    rng = np.random.default_rng(3)
    mats = geometry.rodrigues_to_z(rng.standard_normal((200, 3)))
    six = geometry.rotmat_to_cont6d(mats)
    assert six.shape == (200, 6)
    back = geometry.cont6d_to_rotmat(six)
    np.testing.assert_allclose(back, mats, atol=1e-12)


def test_cont6d_gram_schmidt_renormalizes():
    mat = geometry.yaw_matrix(0.3)
    six = geometry.rotmat_to_cont6d(mat)
    noisy = six * 1.7  # scale both columns; GS must recover the rotation
    np.testing.assert_allclose(geometry.cont6d_to_rotmat(noisy), mat, atol=1e-12)


def test_cont6d_rejects_parallel_columns():
    bad = np.array([1.0, 0.0, 0.0, 2.0, 0.0, 0.0])
    with pytest.raises(geometry.DegenerateRotationError):
        geometry.cont6d_to_rotmat(bad)


def test_compass_azimuth_convention():
    assert geometry.compass_azimuth([0.0, 0.0, 1.0]) == pytest.approx(0.0)
    assert geometry.compass_azimuth([1.0, 0.0, 0.0]) == pytest.approx(np.pi / 2)
    assert geometry.compass_azimuth([-1.0, 0.0, 0.0]) == pytest.approx(-np.pi / 2)


def test_wrap_angle():
    assert geometry.wrap_angle(np.pi) == pytest.approx(np.pi)
    assert geometry.wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert geometry.wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    vals = np.linspace(-10, 10, 101)
    wrapped = geometry.wrap_angle(vals)
    assert np.all(wrapped > -np.pi) and np.all(wrapped <= np.pi)
    np.testing.assert_allclose(np.cos(wrapped), np.cos(vals), atol=1e-12)

"""Rotation helpers shared by the codec, the status extractor, and synthesis.

Conventions: Y is up, +Z is the "north" facing used throughout. Yaw is the
rotation about +Y that turns +Z toward +X (north toward east). All matrices
act on column vectors, ``R @ v``.
"""

from __future__ import annotations

import numpy as np

Z_AXIS = np.array([0.0, 0.0, 1.0])
Y_AXIS = np.array([0.0, 1.0, 0.0])

# cos/sin table for exact k*90 degree turns
_QUARTER_COS = (1.0, 0.0, -1.0, 0.0)
_QUARTER_SIN = (0.0, 1.0, 0.0, -1.0)


class DegenerateRotationError(ValueError):
    """Raised when a direction or 6D block is too degenerate to orient."""


def yaw_matrix(theta):
    """Rotation matrices about +Y for yaw angle(s) ``theta``, shape (..., 3, 3)."""
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    s = np.sin(theta)
    out = np.zeros(theta.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 2] = s
    out[..., 1, 1] = 1.0
    out[..., 2, 0] = -s
    out[..., 2, 2] = c
    return out


def quarter_turn_matrix(k: int) -> np.ndarray:
    """Exact yaw rotation by k*90 degrees (entries are 0 or +-1)."""
    c = _QUARTER_COS[k % 4]
    s = _QUARTER_SIN[k % 4]
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotate_y(theta, v):
    """Apply a yaw rotation to vectors ``v`` (..., 3) without building matrices."""
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    s = np.sin(theta)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    return np.stack([c * x + s * z, y, -s * x + c * z], axis=-1)


def yaw_of(rotmat) -> np.ndarray:
    """Yaw angle of rotation matrices (..., 3, 3): heading of the rotated +Z."""
    return np.arctan2(rotmat[..., 0, 2], rotmat[..., 2, 2])


def axis_angle_matrix(axis, cos_t, sin_t):
    """Rotation about unit ``axis`` (..., 3) given cos/sin of the angle."""
    ax, ay, az = axis[..., 0], axis[..., 1], axis[..., 2]
    c = np.asarray(cos_t, dtype=float)
    s = np.asarray(sin_t, dtype=float)
    one_c = 1.0 - c
    m = np.empty(np.broadcast(ax, c).shape + (3, 3))
    m[..., 0, 0] = c + ax * ax * one_c
    m[..., 0, 1] = ax * ay * one_c - az * s
    m[..., 0, 2] = ax * az * one_c + ay * s
    m[..., 1, 0] = ay * ax * one_c + az * s
    m[..., 1, 1] = c + ay * ay * one_c
    m[..., 1, 2] = ay * az * one_c - ax * s
    m[..., 2, 0] = az * ax * one_c - ay * s
    m[..., 2, 1] = az * ay * one_c + ax * s
    m[..., 2, 2] = c + az * az * one_c
    return m


def rodrigues_to_z(r, eps: float = 1e-9):
    """Rotation matrices taking each direction ``r`` (..., 3) onto +Z.

    The rotation axis is ``r_hat x z_hat`` and the angle is the angle between
    the two. A direction already along +Z maps to the identity; an
    antiparallel direction uses the fixed tie-break of a 180-degree rotation
    about +X. Near-zero inputs raise :class:`DegenerateRotationError`.
    """
    r = np.asarray(r, dtype=float)
    norm = np.linalg.norm(r, axis=-1)
    if np.any(norm < eps):
        raise DegenerateRotationError("direction norm below %g" % eps)
    rhat = r / norm[..., None]
    # axis = rhat x zhat = (rhat_y, -rhat_x, 0); |axis| = sin(angle)
    sin_t = np.hypot(rhat[..., 0], rhat[..., 1])
    cos_t = rhat[..., 2]
    safe = np.maximum(sin_t, 1e-300)
    axis = np.stack(
        [rhat[..., 1] / safe, -rhat[..., 0] / safe, np.zeros_like(sin_t)], axis=-1
    )
    m = axis_angle_matrix(axis, cos_t, sin_t)
    # parallel / antiparallel: axis is undefined, patch the closed forms in
    degenerate = sin_t < 1e-12
    if np.any(degenerate):
        m = np.where(
            degenerate[..., None, None],
            np.where(
                cos_t[..., None, None] > 0,
                np.eye(3),
                np.diag([1.0, -1.0, -1.0]),
            ),
            m,
        )
    return m


def rotation_from_z(direction, eps: float = 1e-9):
    """Rotation matrices taking +Z onto each ``direction`` (inverse of above)."""
    return np.swapaxes(rodrigues_to_z(direction, eps=eps), -1, -2)


def rotmat_to_cont6d(rotmat) -> np.ndarray:
    """First two columns of rotation matrices (..., 3, 3) flattened to (..., 6)."""
    rotmat = np.asarray(rotmat, dtype=float)
    return np.concatenate([rotmat[..., :, 0], rotmat[..., :, 1]], axis=-1)


def cont6d_to_rotmat(x, eps: float = 1e-8) -> np.ndarray:
    """Recover rotation matrices from 6D blocks (..., 6) by Gram-Schmidt.

    Raises :class:`DegenerateRotationError` when the two generating vectors
    are (numerically) parallel or zero.
    """
    x = np.asarray(x, dtype=float)
    a = x[..., 0:3]
    b = x[..., 3:6]
    na = np.linalg.norm(a, axis=-1)
    if np.any(na < eps):
        raise DegenerateRotationError("first 6D column is near zero")
    c0 = a / na[..., None]
    b_perp = b - np.sum(c0 * b, axis=-1, keepdims=True) * c0
    nb = np.linalg.norm(b_perp, axis=-1)
    if np.any(nb < eps):
        raise DegenerateRotationError("6D columns are near parallel")
    c1 = b_perp / nb[..., None]
    c2 = np.cross(c0, c1)
    return np.stack([c0, c1, c2], axis=-1)


def compass_azimuth(v) -> np.ndarray:
    """Azimuth of horizontal component(s): 0 at +Z (north), +pi/2 at +X (east)."""
    v = np.asarray(v, dtype=float)
    return np.arctan2(v[..., 0], v[..., 2])


def wrap_angle(theta):
    """Wrap angle(s) into (-pi, pi]."""
    out = np.mod(np.asarray(theta, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(out == -np.pi, np.pi, out)

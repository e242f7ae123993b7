"""Encode world-space joints into the feature representation and back.

Velocity channels at frame n describe the change from frame n to n+1 and the
last frame repeats the previous one, so integrating the first N-1 entries
reproduces the trajectory exactly. All per-frame vectors (root velocity,
local joint positions, joint velocities) live in the root's yaw-aligned
frame; the recovery rotates them back by the integrated yaw.
"""

from __future__ import annotations

import numpy as np

from .. import geometry
from .layout import RepresentationLayout
from .types import GlobalJoints, MotionSequence

# world-space speed (m/frame) below which a heel/toe counts as planted
CONTACT_VELOCITY_THRESHOLD = 0.002

# heel/toe joint indices in the canonical 22-joint ordering: l_ankle, l_foot,
# r_ankle, r_foot
DEFAULT_CONTACT_JOINTS = (7, 10, 8, 11)


def encode(
    joints: GlobalJoints,
    rotations: np.ndarray,
    layout: RepresentationLayout,
    contact_joints: tuple = DEFAULT_CONTACT_JOINTS,
    contact_threshold: float = CONTACT_VELOCITY_THRESHOLD,
) -> MotionSequence:
    """Build the feature matrix from joints and per-joint world rotations.

    ``rotations`` is (n_frames, n_joints, 3, 3). Non-root rotation blocks are
    stored yaw-locally; the root block (absolute layout only) keeps its world
    orientation so facing survives the encoding.
    """
    pos = joints.positions
    n, j, _ = pos.shape
    if j != layout.joint_count:
        raise ValueError(
            f"joint count {j} does not match layout joint_count {layout.joint_count}"
        )
    rotations = np.asarray(rotations, dtype=float)
    if rotations.shape != (n, j, 3, 3):
        raise ValueError("rotations must be (n_frames, n_joints, 3, 3)")

    yaw = geometry.yaw_of(rotations[:, 0])
    out = np.zeros((n, layout.dim))

    # root angular velocity, padded by repeating the last real entry
    if n > 1:
        dyaw = geometry.wrap_angle(np.diff(yaw))
        out[:-1, 0] = dyaw
        out[-1, 0] = dyaw[-1]

    root = pos[:, 0]
    if n > 1:
        v_root = root[1:] - root[:-1]
        local_v = geometry.rotate_y(-yaw[:-1], v_root)
        out[:-1, 1] = local_v[:, 0]
        out[:-1, 2] = local_v[:, 2]
        out[-1, 1:3] = out[-2, 1:3]
    out[:, 3] = root[:, 1]

    rel = pos[:, 1:] - root[:, None, :]
    local_pos = geometry.rotate_y(-yaw[:, None], rel)
    out[:, layout.positions_slice] = local_pos.reshape(n, -1)

    inv_yaw_rot = geometry.yaw_matrix(-yaw)
    local_rot = np.einsum("nab,njbc->njac", inv_yaw_rot, rotations)
    if layout.includes_root_rotation:
        blocks = local_rot.copy()
        blocks[:, 0] = rotations[:, 0]
    else:
        blocks = local_rot[:, 1:]
    out[:, layout.rotations_slice] = geometry.rotmat_to_cont6d(blocks).reshape(n, -1)

    if n > 1:
        v_world = pos[1:] - pos[:-1]
        local_vel = geometry.rotate_y(-yaw[:-1, None], v_world)
        vel = np.empty((n, j, 3))
        vel[:-1] = local_vel
        vel[-1] = local_vel[-1]
    else:
        vel = np.zeros((n, j, 3))
        v_world = np.zeros((1, j, 3))
    out[:, layout.velocities_slice] = vel.reshape(n, -1)

    speeds = np.linalg.norm(v_world[:, contact_joints, :], axis=-1)
    contacts = np.empty((n, 4))
    if n > 1:
        contacts[:-1] = (speeds < contact_threshold).astype(float)
        contacts[-1] = contacts[-2]
    else:
        contacts[:] = 1.0
    out[:, layout.contacts_slice] = contacts

    return MotionSequence(frames=out, fps=joints.fps, layout=layout)


def _integrate_root(frames: np.ndarray, layout: RepresentationLayout, initial_yaw):
    n = frames.shape[0]
    if initial_yaw is None:
        if layout.includes_root_rotation:
            block = geometry.cont6d_to_rotmat(frames[0, layout.rotation_block(0)])
            initial_yaw = float(geometry.yaw_of(block))
        else:
            initial_yaw = 0.0
    yaw = np.empty(n)
    yaw[0] = initial_yaw
    if n > 1:
        yaw[1:] = initial_yaw + np.cumsum(frames[:-1, 0])

    root = np.zeros((n, 3))
    if n > 1:
        step = np.stack(
            [frames[:-1, 1], np.zeros(n - 1), frames[:-1, 2]], axis=-1
        )
        world_step = geometry.rotate_y(yaw[:-1], step)
        root[1:, 0] = np.cumsum(world_step[:, 0])
        root[1:, 2] = np.cumsum(world_step[:, 2])
    root[:, 1] = frames[:, 3]
    return yaw, root


def decode(motion: MotionSequence, initial_yaw: float | None = None) -> GlobalJoints:
    """Recover world-space joints from the feature matrix.

    The starting yaw defaults to 0 (facing +Z) for the facing-invariant
    layout and is read from the first frame's root rotation block for the
    absolute layout; pass ``initial_yaw`` to override. The root starts at the
    horizontal origin.
    """
    layout = motion.layout
    frames = np.asarray(motion.frames, dtype=float)
    n = frames.shape[0]
    j = layout.joint_count
    yaw, root = _integrate_root(frames, layout, initial_yaw)

    local = frames[:, layout.positions_slice].reshape(n, j - 1, 3)
    world = geometry.rotate_y(yaw[:, None], local) + root[:, None, :]
    pos = np.concatenate([root[:, None, :], world], axis=1)
    return GlobalJoints(positions=pos, fps=motion.fps)


def decode_rotations(
    motion: MotionSequence, initial_yaw: float | None = None
) -> np.ndarray:
    """World orientations (n_frames, j, 3, 3) implied by the rotation blocks.

    Non-root blocks are yaw-local, so they are rotated back by the integrated
    yaw; the root comes from its absolute block when present and is the pure
    yaw rotation otherwise.
    """
    layout = motion.layout
    frames = np.asarray(motion.frames, dtype=float)
    n = frames.shape[0]
    j = layout.joint_count
    yaw, _ = _integrate_root(frames, layout, initial_yaw)
    blocks = frames[:, layout.rotations_slice].reshape(n, -1, 6)
    mats = geometry.cont6d_to_rotmat(blocks)
    yaw_rot = geometry.yaw_matrix(yaw)

    out = np.empty((n, j, 3, 3))
    if layout.includes_root_rotation:
        out[:, 0] = mats[:, 0]
        out[:, 1:] = np.einsum("nab,njbc->njac", yaw_rot, mats[:, 1:])
    else:
        out[:, 0] = yaw_rot
        out[:, 1:] = np.einsum("nab,njbc->njac", yaw_rot, mats)
    return out

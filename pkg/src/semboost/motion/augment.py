"""Quarter-turn augmentation of motion sequences about the vertical axis."""

from __future__ import annotations

import numpy as np

from .. import geometry
from .codec import decode, decode_rotations, encode
from .types import GlobalJoints, MotionSequence


def rotate_augment(motion: MotionSequence, k: int) -> MotionSequence:
    """Rotate a motion by k*90 degrees about the vertical through the
    first frame's root ground projection.

    Requires the absolute-orientation layout: with the facing-invariant one
    every channel is yaw-relative, so the operation would be the identity and
    is rejected instead. The rotation matrix has exact 0/+-1 entries, the
    motion is decoded, rotated in world space and re-encoded, and the height
    and foot-contact channels are carried over verbatim.
    """
    if not motion.layout.includes_root_rotation:
        raise ValueError("augmentation requires absolute-orientation layout")
    if k not in (0, 1, 2, 3):
        raise ValueError("k must be one of 0, 1, 2, 3")
    if k == 0:
        return MotionSequence(
            frames=motion.frames.copy(), fps=motion.fps, layout=motion.layout
        )

    joints = decode(motion)
    rotations = decode_rotations(motion)
    q = geometry.quarter_turn_matrix(k)

    pivot = joints.positions[0, 0] * np.array([1.0, 0.0, 1.0])
    pos = (joints.positions - pivot) @ q.T + pivot
    rot = np.einsum("ab,njbc->njac", q, rotations)

    out = encode(
        GlobalJoints(positions=pos, fps=motion.fps), rot, motion.layout
    )
    frames = out.frames
    frames[:, 3] = motion.frames[:, 3]
    frames[:, motion.layout.contacts_slice] = motion.frames[
        :, motion.layout.contacts_slice
    ]
    return MotionSequence(frames=frames, fps=motion.fps, layout=motion.layout)

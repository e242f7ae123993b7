"""Geometric extraction of head direction and torso orientation from joints.

Per frame i: the raw head direction is T_i = (J_nose + p_mid_eye)/2 -
p_mid_ear, the torso normal is R_i = (J_neck - J_lshoulder) x (J_neck -
J_rshoulder), and the body-relative head direction is O_i = M T_i with M the
rotation taking R_i onto +Z (axis R_i x Z, angle between them; an
antiparallel normal falls back to a 180-degree turn about +X).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import geometry
from ..motion.types import GlobalJoints, SkeletonMap


class DegenerateTorsoError(ValueError):
    """Torso normal too small to orient (shoulders collinear with neck)."""


@dataclass(frozen=True)
class ExtractorFrame:
    head_direction: np.ndarray  # world-frame head direction
    torso_normal: np.ndarray  # world-frame torso facing normal
    body_relative: np.ndarray  # head direction in the torso-aligned frame
    frame: int


def _vectors(positions: np.ndarray, skeleton: SkeletonMap):
    """T/R/O for a stack of frames (n, J, 3); raises on degenerate torsos."""
    nose = positions[:, skeleton.nose]
    mid_eye = 0.5 * (positions[:, skeleton.l_eye] + positions[:, skeleton.r_eye])
    mid_ear = 0.5 * (positions[:, skeleton.l_ear] + positions[:, skeleton.r_ear])
    head_dir = 0.5 * (nose + mid_eye) - mid_ear

    neck = positions[:, skeleton.neck]
    a = neck - positions[:, skeleton.l_shoulder]
    b = neck - positions[:, skeleton.r_shoulder]
    normal = np.cross(a, b)
    norms = np.linalg.norm(normal, axis=-1)
    if np.any(norms < 1e-9):
        bad = int(np.argmax(norms < 1e-9))
        raise DegenerateTorsoError(f"degenerate torso normal at frame {bad}")

    to_z = geometry.rodrigues_to_z(normal)
    relative = np.einsum("nab,nb->na", to_z, head_dir)
    return head_dir, normal, relative


def extract_head(
    joints: GlobalJoints, skeleton: SkeletonMap, frame: int
) -> ExtractorFrame:
    """Extract the head/torso vectors of one frame."""
    if not 0 <= frame < joints.n_frames:
        raise IndexError(f"frame {frame} out of range")
    head_dir, normal, relative = _vectors(
        joints.positions[frame : frame + 1], skeleton
    )
    return ExtractorFrame(
        head_direction=head_dir[0],
        torso_normal=normal[0],
        body_relative=relative[0],
        frame=frame,
    )


def extract_frames(joints: GlobalJoints, skeleton: SkeletonMap, frames=None):
    """Vectorized extraction; ``frames`` defaults to every frame.

    Returns (head_dir, torso_normal, body_relative) arrays of shape (n, 3).
    """
    pos = joints.positions if frames is None else joints.positions[frames]
    return _vectors(pos, skeleton)

"""Canonical synthetic skeleton: 22 body joints plus 5 face landmarks.

Body joints follow the usual 22-joint ordering (pelvis root, legs, spine,
neck/head, collars, shoulders, arms); the face landmarks the status extractor
needs (nose, eyes, ears) are appended at indices 22..26, rigidly attached to
the head joint. The template pose faces +Z with Y up and the pelvis at the
origin; the left side of the body sits at negative X.
"""

from __future__ import annotations

import numpy as np

from ..motion.types import SkeletonMap

N_BODY_JOINTS = 22
N_JOINTS = 27
HEAD_JOINT = 15
ROOT_HEIGHT = 0.90

BODY_JOINT_NAMES = (
    "pelvis", "l_hip", "r_hip", "spine1", "l_knee", "r_knee", "spine2",
    "l_ankle", "r_ankle", "spine3", "l_foot", "r_foot", "neck", "l_collar",
    "r_collar", "head", "l_shoulder", "r_shoulder", "l_elbow", "r_elbow",
    "l_wrist", "r_wrist",
)
FACE_JOINT_NAMES = ("nose", "l_eye", "r_eye", "l_ear", "r_ear")

# pelvis-relative template offsets of the body joints (T-pose, facing +Z)
_BODY_TEMPLATE = np.array([
    [0.00, 0.00, 0.00],    # pelvis
    [-0.10, -0.06, 0.00],  # l_hip
    [0.10, -0.06, 0.00],   # r_hip
    [0.00, 0.12, 0.00],    # spine1
    [-0.10, -0.44, 0.00],  # l_knee
    [0.10, -0.44, 0.00],   # r_knee
    [0.00, 0.26, 0.00],    # spine2
    [-0.10, -0.84, 0.00],  # l_ankle
    [0.10, -0.84, 0.00],   # r_ankle
    [0.00, 0.40, 0.00],    # spine3
    [-0.10, -0.90, 0.12],  # l_foot
    [0.10, -0.90, 0.12],   # r_foot
    [0.00, 0.50, 0.00],    # neck
    [-0.08, 0.46, 0.00],   # l_collar
    [0.08, 0.46, 0.00],    # r_collar
    [0.00, 0.62, 0.00],    # head
    [-0.20, 0.48, 0.00],   # l_shoulder
    [0.20, 0.48, 0.00],    # r_shoulder
    [-0.20, 0.18, 0.00],   # l_elbow
    [0.20, 0.18, 0.00],    # r_elbow
    [-0.20, -0.10, 0.00],  # l_wrist
    [0.20, -0.10, 0.00],   # r_wrist
])

# head-relative face landmark offsets; chosen so the extractor's raw head
# direction (nose/eyes vs ears midpoints) is exactly +Z scaled by 0.09
FACE_OFFSETS = np.array([
    [0.00, 0.00, 0.10],   # nose
    [-0.03, 0.04, 0.08],  # l_eye
    [0.03, 0.04, 0.08],   # r_eye
    [-0.07, 0.02, 0.00],  # l_ear
    [0.07, 0.02, 0.00],   # r_ear
])

UPPER_ARM = 0.30
FOREARM = 0.28

PARENTS = (
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19,
    15, 15, 15, 15, 15,
)
BONES = tuple((p, c) for c, p in enumerate(PARENTS) if p >= 0)

CANONICAL_SKELETON = SkeletonMap(
    total_joints=N_JOINTS,
    nose=22,
    l_eye=23,
    r_eye=24,
    l_ear=25,
    r_ear=26,
    neck=12,
    l_shoulder=16,
    r_shoulder=17,
    pelvis=0,
    l_wrist=20,
    r_wrist=21,
)


def template_pose() -> np.ndarray:
    """Template positions (27, 3) with the pelvis at the origin."""
    pose = np.zeros((N_JOINTS, 3))
    pose[:N_BODY_JOINTS] = _BODY_TEMPLATE
    pose[N_BODY_JOINTS:] = _BODY_TEMPLATE[HEAD_JOINT] + FACE_OFFSETS
    return pose

from .skeleton import (
    BONES,
    CANONICAL_SKELETON,
    FACE_OFFSETS,
    HEAD_JOINT,
    N_BODY_JOINTS,
    N_JOINTS,
    template_pose,
)
from .script import Segment, MotionScript, random_script
from .generator import generate, make_corpus, restore_face_landmarks, CorpusItem

__all__ = [
    "BONES",
    "CANONICAL_SKELETON",
    "FACE_OFFSETS",
    "HEAD_JOINT",
    "N_BODY_JOINTS",
    "N_JOINTS",
    "template_pose",
    "Segment",
    "MotionScript",
    "random_script",
    "generate",
    "make_corpus",
    "restore_face_landmarks",
    "CorpusItem",
]

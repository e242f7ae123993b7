from .layout import RepresentationLayout, layout_263, layout_269
from .types import GlobalJoints, MotionSequence, SkeletonMap
from .codec import encode, decode, decode_rotations
from .augment import rotate_augment
from . import io

__all__ = [
    "RepresentationLayout",
    "layout_263",
    "layout_269",
    "GlobalJoints",
    "MotionSequence",
    "SkeletonMap",
    "encode",
    "decode",
    "decode_rotations",
    "rotate_augment",
    "io",
]

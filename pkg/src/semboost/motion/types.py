"""Core value types: motion feature sequences, world-space joints, skeleton map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layout import RepresentationLayout


@dataclass(frozen=True)
class MotionSequence:
    """N x D feature matrix plus its frame rate and channel layout."""

    frames: np.ndarray
    fps: float
    layout: RepresentationLayout

    def __post_init__(self):
        frames = np.asarray(self.frames)
        if frames.ndim != 2:
            raise ValueError("frames must be 2-D (n_frames, dim)")
        if frames.shape[0] < 1:
            raise ValueError("need at least one frame")
        if frames.shape[1] != self.layout.dim:
            raise ValueError(
                f"row width {frames.shape[1]} does not match layout dim {self.layout.dim}"
            )
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def validate(self) -> None:
        """Check the cheap value invariants (finite data, contact flags in [0,1])."""
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("non-finite feature values")
        contacts = self.frames[:, self.layout.contacts_slice]
        if contacts.min() < 0.0 or contacts.max() > 1.0:
            raise ValueError("foot-contact channels outside [0, 1]")


@dataclass(frozen=True)
class GlobalJoints:
    """World-space joint positions (n_frames, n_joints, 3), Y-up, meters."""

    positions: np.ndarray
    fps: float

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 3 or pos.shape[2] != 3:
            raise ValueError("positions must be (n_frames, n_joints, 3)")
        if pos.shape[0] < 1:
            raise ValueError("need at least one frame")
        if not np.all(np.isfinite(pos)):
            raise ValueError("non-finite joint positions")
        object.__setattr__(self, "positions", pos)

    @property
    def n_frames(self) -> int:
        return self.positions.shape[0]

    @property
    def n_joints(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class SkeletonMap:
    """Named joint indices into a skeleton; Y is up and +Z is "north".

    The face landmarks (nose/ears/eyes) are whatever the skeleton provides;
    the canonical synthetic skeleton appends them after the 22 body joints.
    """

    total_joints: int
    nose: int
    l_ear: int
    r_ear: int
    l_eye: int
    r_eye: int
    neck: int
    l_shoulder: int
    r_shoulder: int
    pelvis: int
    l_wrist: int
    r_wrist: int

    def __post_init__(self):
        named = self.named_indices()
        if len(set(named.values())) != len(named):
            raise ValueError("skeleton map indices must be distinct")
        for name, idx in named.items():
            if not 0 <= idx < self.total_joints:
                raise ValueError(f"{name} index {idx} out of range")
        if self.total_joints < 12:
            raise ValueError("skeleton too small for the status extractor")

    def named_indices(self) -> dict:
        return {
            "nose": self.nose,
            "l_ear": self.l_ear,
            "r_ear": self.r_ear,
            "l_eye": self.l_eye,
            "r_eye": self.r_eye,
            "neck": self.neck,
            "l_shoulder": self.l_shoulder,
            "r_shoulder": self.r_shoulder,
            "pelvis": self.pelvis,
            "l_wrist": self.l_wrist,
            "r_wrist": self.r_wrist,
        }

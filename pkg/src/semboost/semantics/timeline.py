"""Down-sampled per-part status timelines for a motion clip."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import geometry
from ..motion.types import GlobalJoints, SkeletonMap
from .extractor import extract_frames
from .translator import (
    PARTS,
    TranslatorConfig,
    classify_body,
    classify_hand,
    classify_head,
)


@dataclass(frozen=True)
class StatusTimeline:
    """One status word per kept frame for each classified body part."""

    frame_indices: tuple
    statuses: dict = field(default_factory=dict)

    def __post_init__(self):
        for part, words in self.statuses.items():
            if len(words) != len(self.frame_indices):
                raise ValueError(f"{part}: {len(words)} words for "
                                 f"{len(self.frame_indices)} kept frames")


def status_timeline(
    joints: GlobalJoints,
    skeleton: SkeletonMap,
    cfg: TranslatorConfig | None = None,
) -> StatusTimeline:
    """Classify every cfg.downsample-th frame for all four parts.

    Hand vectors are wrist minus pelvis rotated into the yaw-aligned body
    frame, the yaw coming from the torso normal's horizontal azimuth (held
    from the previous kept frame when that projection vanishes).
    """
    cfg = cfg or TranslatorConfig()
    kept = np.arange(0, joints.n_frames, cfg.downsample)
    _, normals, relative = extract_frames(joints, skeleton, kept)
    pos = joints.positions[kept]

    body: list[str] = []
    head: list[str] = []
    hands: dict[str, list[str]] = {"left_hand": [], "right_hand": []}
    prev_body: str | None = None
    prev_yaw = 0.0

    for i in range(len(kept)):
        word = classify_body(normals[i], cfg, previous=prev_body)
        body.append(word)
        prev_body = word
        head.append(classify_head(relative[i], cfg))

        horiz = np.hypot(normals[i, 0], normals[i, 2])
        yaw = np.arctan2(normals[i, 0], normals[i, 2]) if horiz >= 1e-12 else prev_yaw
        prev_yaw = yaw
        pelvis = pos[i, skeleton.pelvis]
        for part, wrist_idx, shoulder_idx in (
            ("left_hand", skeleton.l_wrist, skeleton.l_shoulder),
            ("right_hand", skeleton.r_wrist, skeleton.r_shoulder),
        ):
            wrist = pos[i, wrist_idx]
            rel = geometry.rotate_y(-yaw, wrist - pelvis)
            hands[part].append(
                classify_hand(rel, wrist[1], pos[i, shoulder_idx][1], cfg)
            )

    return StatusTimeline(
        frame_indices=tuple(int(k) for k in kept),
        statuses={
            "body_direction": body,
            "head": head,
            "left_hand": hands["left_hand"],
            "right_hand": hands["right_hand"],
        },
    )

"""Rules mapping geometric quantities to discrete body-part status words.

Compass convention: +Z is north, +X is east; sector boundaries sit at 45,
135, 225 and 315 degrees. The head vocabulary combines a forward cone with
horizontal/vertical half-planes behind it; hands use eight 45-degree sectors
around the hips plus "raise-up".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BODY_WORDS = ("east", "north", "west", "south")
HEAD_WORDS = (
    "forward",
    "leftward",
    "rightward",
    "upward",
    "downward",
    "up-left",
    "up-right",
    "down-left",
    "down-right",
)
HAND_WORDS = (
    "front",
    "front-left",
    "left",
    "back-left",
    "back",
    "back-right",
    "right",
    "front-right",
    "raise-up",
)
PARTS = ("body_direction", "head", "left_hand", "right_hand")
VOCABULARIES = {
    "body_direction": BODY_WORDS,
    "head": HEAD_WORDS,
    "left_hand": HAND_WORDS,
    "right_hand": HAND_WORDS,
}

# compass order by azimuth from +Z, and hand sectors by azimuth from body-front
_COMPASS_ORDER = ("north", "east", "south", "west")
_HAND_ORDER = (
    "front",
    "front-right",
    "right",
    "back-right",
    "back",
    "back-left",
    "left",
    "front-left",
)


@dataclass(frozen=True)
class TranslatorConfig:
    """Thresholds of the word lookup plus the frame down-sample factor."""

    forward_threshold: float = 0.85  # cosine bound of the head's forward cone
    deadzone: float = 0.15  # component magnitude treated as centered
    downsample: int = 10

    def __post_init__(self):
        if not 0.0 < self.forward_threshold < 1.0:
            raise ValueError("forward_threshold must lie in (0, 1)")
        if not 0.0 <= self.deadzone < self.forward_threshold:
            raise ValueError("deadzone must lie in [0, forward_threshold)")
        if self.downsample < 1:
            raise ValueError("downsample must be >= 1")


def classify_head(direction, cfg: TranslatorConfig) -> str:
    """Word for a body-relative head direction vector.

    The vector is normalized first; inside the forward cone the word is
    "forward", otherwise the sign pattern of the x/y components outside the
    deadzone picks the (possibly combined) sideways/vertical word.
    """
    v = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        return "forward"
    x, y, z = v / norm
    if z > cfg.forward_threshold:
        return "forward"
    horizontal = "rightward" if x > cfg.deadzone else "leftward" if x < -cfg.deadzone else None
    vertical = "upward" if y > cfg.deadzone else "downward" if y < -cfg.deadzone else None
    if horizontal and vertical:
        return ("up" if vertical == "upward" else "down") + "-" + (
            "left" if horizontal == "leftward" else "right"
        )
    return horizontal or vertical or "forward"


def classify_body(normal, cfg: TranslatorConfig, previous: str | None = None) -> str:
    """Compass word for a torso normal; holds the previous word (first frame:
    north) when the horizontal projection vanishes."""
    v = np.asarray(normal, dtype=float)
    if math.hypot(v[0], v[2]) < 1e-12:
        return previous if previous is not None else "north"
    azimuth = math.atan2(v[0], v[2])
    sector = int(math.floor((math.degrees(azimuth) + 45.0) / 90.0)) % 4
    return _COMPASS_ORDER[sector]


def classify_hand(
    relative, wrist_height: float, shoulder_height: float, cfg: TranslatorConfig
) -> str:
    """Word for a wrist given its pelvis-relative vector in the yaw-aligned
    body frame; a wrist above the same-side shoulder is "raise-up"."""
    if wrist_height > shoulder_height:
        return "raise-up"
    v = np.asarray(relative, dtype=float)
    if math.hypot(v[0], v[2]) < 1e-12:
        return "front"
    azimuth = math.atan2(v[0], v[2])
    sector = int(math.floor((math.degrees(azimuth) + 22.5) / 45.0)) % 8
    return _HAND_ORDER[sector]


def translate(
    value,
    part: str,
    cfg: TranslatorConfig,
    wrist_height: float | None = None,
    shoulder_height: float | None = None,
    previous: str | None = None,
) -> str:
    """Dispatch to the per-part classifier; total over finite inputs."""
    if part == "head":
        return classify_head(value, cfg)
    if part == "body_direction":
        return classify_body(value, cfg, previous=previous)
    if part in ("left_hand", "right_hand"):
        if wrist_height is None or shoulder_height is None:
            raise ValueError("hand classification needs wrist and shoulder heights")
        return classify_hand(value, wrist_height, shoulder_height, cfg)
    raise ValueError(f"unknown body part {part!r}")

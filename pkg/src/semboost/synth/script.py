"""Motion scripts: segment-wise targets the generator realizes kinematically."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..semantics.translator import BODY_WORDS, HAND_WORDS, HEAD_WORDS

MAX_SCRIPT_FRAMES = 196

# directions handed to the generator sit at sector centers (or, for the head,
# well inside the forward cone / component deadzones), keeping every target at
# least ~10 degrees away from a classification boundary
HEAD_TARGET_DIRS = {
    "forward": (0.0, 0.0, 1.0),
    "leftward": (-0.72, 0.0, 0.694),
    "rightward": (0.72, 0.0, 0.694),
    "upward": (0.0, 0.72, 0.694),
    "downward": (0.0, -0.72, 0.694),
    "up-left": (-0.55, 0.55, 0.628),
    "up-right": (0.55, 0.55, 0.628),
    "down-left": (-0.55, -0.55, 0.628),
    "down-right": (0.55, -0.55, 0.628),
}

# headings sit a hair off the exact cardinal angles: at exactly 180 degrees
# the torso normal is antiparallel to +Z and the extractor's documented
# tie-break kicks in, which is a different convention than the continuous
# yaw-removal branch that near-south normals (e.g. synthesized motions) take
_HEADING_NUDGE = 1e-6
HEADING_YAW = {
    "north": _HEADING_NUDGE,
    "east": 0.5 * np.pi + _HEADING_NUDGE,
    "south": np.pi + _HEADING_NUDGE,
    "west": -0.5 * np.pi + _HEADING_NUDGE,
}

HAND_AZIMUTH = {
    "front": 0.0,
    "front-right": 0.25 * np.pi,
    "right": 0.5 * np.pi,
    "back-right": 0.75 * np.pi,
    "back": np.pi,
    "back-left": -0.75 * np.pi,
    "left": -0.5 * np.pi,
    "front-left": -0.25 * np.pi,
}


@dataclass(frozen=True)
class Segment:
    duration: int  # frame steps this segment spans
    locomotion: str  # "stand" | "walk"
    heading: str  # compass word the body faces (and walks along)
    head: str = "forward"
    left_hand: str = "left"
    right_hand: str = "right"

    def __post_init__(self):
        if self.duration < 1:
            raise ValueError("infeasible script: zero-duration segment")
        if self.locomotion not in ("stand", "walk"):
            raise ValueError(f"unknown locomotion {self.locomotion!r}")
        if self.heading not in BODY_WORDS:
            raise ValueError(f"unknown heading {self.heading!r}")
        if self.head not in HEAD_WORDS:
            raise ValueError(f"unknown head target {self.head!r}")
        for hand in (self.left_hand, self.right_hand):
            if hand not in HAND_WORDS:
                raise ValueError(f"unknown hand target {hand!r}")


@dataclass(frozen=True)
class MotionScript:
    """Segments plus the plain caption; a script of total duration d emits
    d+1 frames (frame n sits at time n/fps, so a d-step walk covers d/fps
    seconds of travel)."""

    segments: tuple
    caption: str
    seed: int = 0

    def __post_init__(self):
        if not self.segments:
            raise ValueError("infeasible script: no segments")
        if self.n_frames > MAX_SCRIPT_FRAMES:
            raise ValueError(
                f"script emits {self.n_frames} frames, cap is {MAX_SCRIPT_FRAMES}"
            )

    @property
    def n_frames(self) -> int:
        return sum(s.duration for s in self.segments) + 1


def _plain_caption(segments, rng) -> str:
    verbs = []
    for seg in segments:
        verb = "walks" if seg.locomotion == "walk" else "stands"
        if not verbs or verbs[-1] != verb:
            verbs.append(verb)
    text = "a person " + " then ".join(verbs)
    if any("raise-up" in (s.left_hand, s.right_hand) for s in segments):
        text += " and raises a hand"
    return text


def random_script(
    rng: np.random.Generator,
    max_segments: int = 2,
    min_duration: int = 14,
    max_duration: int = 22,
    seed: int = 0,
    head_choices=None,
    hand_choices=None,
) -> MotionScript:
    """Seeded random script; targets come from the margin-safe tables.

    ``head_choices``/``hand_choices`` restrict the target vocabularies
    (useful for small training corpora where the full combinatorics would
    drown a toy model).
    """
    heads = list(head_choices) if head_choices else list(HEAD_TARGET_DIRS)
    hands = list(hand_choices) if hand_choices else list(HAND_AZIMUTH) + ["raise-up"]
    n_seg = int(rng.integers(1, max_segments + 1))
    segments = []
    for _ in range(n_seg):
        segments.append(
            Segment(
                duration=int(rng.integers(min_duration, max_duration + 1)),
                locomotion=str(rng.choice(["walk", "stand"])),
                heading=str(rng.choice(list(HEADING_YAW))),
                head=str(rng.choice(heads)),
                left_hand=str(rng.choice(hands)),
                right_hand=str(rng.choice(hands)),
            )
        )
    return MotionScript(
        segments=tuple(segments),
        caption=_plain_caption(segments, rng),
        seed=seed,
    )

"""Status-histogram similarities: how well a synthesized motion realizes the
body-direction / head-orientation / hand statuses of its reference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..motion.types import GlobalJoints, SkeletonMap
from ..semantics.timeline import status_timeline
from ..semantics.translator import PARTS, VOCABULARIES, TranslatorConfig


@dataclass(frozen=True)
class StatusHistogram:
    """Normalized frequency of one part's statuses over kept frames."""

    part: str
    frequencies: np.ndarray

    def __post_init__(self):
        if self.part not in VOCABULARIES:
            raise ValueError(f"unknown part {self.part!r}")
        freq = np.asarray(self.frequencies, dtype=float)
        if freq.shape != (len(VOCABULARIES[self.part]),):
            raise ValueError(f"{self.part}: histogram length mismatch")
        if freq.min() < 0.0:
            raise ValueError("negative frequency")
        if abs(freq.sum() - 1.0) > 1e-9:
            raise ValueError("histogram must sum to 1")
        object.__setattr__(self, "frequencies", freq)


def histogram_from_words(part: str, words) -> StatusHistogram:
    vocab = VOCABULARIES[part]
    index = {w: i for i, w in enumerate(vocab)}
    counts = np.zeros(len(vocab))
    for w in words:
        counts[index[w]] += 1.0
    if counts.sum() == 0:
        raise ValueError("empty status timeline")
    return StatusHistogram(part=part, frequencies=counts / counts.sum())


def motion_histogram(
    joints: GlobalJoints,
    part: str,
    skeleton: SkeletonMap,
    cfg: TranslatorConfig | None = None,
) -> StatusHistogram:
    timeline = status_timeline(joints, skeleton, cfg)
    return histogram_from_words(part, timeline.statuses[part])


def histogram_cosine(a: StatusHistogram, b: StatusHistogram) -> float:
    """Cosine similarity of two histograms; in [0, 1] since entries are
    non-negative, and 1 exactly when they are parallel."""
    if a.part != b.part:
        raise ValueError("histograms describe different parts")
    fa, fb = a.frequencies, b.frequencies
    return float(np.dot(fa, fb) / (np.linalg.norm(fa) * np.linalg.norm(fb)))


def status_similarity(
    real: GlobalJoints,
    gen: GlobalJoints,
    part: str,
    skeleton: SkeletonMap,
    cfg: TranslatorConfig | None = None,
) -> float:
    """Cosine similarity of the two motions' status histograms for a part."""
    return histogram_cosine(
        motion_histogram(real, part, skeleton, cfg),
        motion_histogram(gen, part, skeleton, cfg),
    )


def paired_status_similarity(
    real_motions,
    gen_motions,
    part: str,
    skeleton: SkeletonMap,
    cfg: TranslatorConfig | None = None,
) -> float:
    """Dataset-level score: mean per-pair similarity over aligned lists.

    This is the aggregation behind the translation / head-orientation /
    left-hand similarity numbers (parts "body_direction", "head",
    "left_hand").
    """
    if len(real_motions) != len(gen_motions):
        raise ValueError("real and generated lists must pair up")
    sims = [
        status_similarity(r, g, part, skeleton, cfg)
        for r, g in zip(real_motions, gen_motions)
    ]
    return float(np.mean(sims))

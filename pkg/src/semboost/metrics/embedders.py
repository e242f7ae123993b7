"""Motion embedders for the embedding-space metrics.

The toy embedder pools per-channel statistics through a fixed seeded
projection; it stands in for the pretrained contrastive model used at full
scale (out of scope here), giving the metric plumbing something
deterministic to chew on.
"""

from __future__ import annotations

import numpy as np

from ..motion.types import MotionSequence

_PROJECTION_SEED = 77003


class ToyMotionEmbedder:
    def __init__(self, dim: int = 512):
        self.dim = dim
        self._proj = {}

    def _projection(self, feat_dim: int) -> np.ndarray:
        if feat_dim not in self._proj:
            rng = np.random.default_rng(_PROJECTION_SEED + feat_dim)
            self._proj[feat_dim] = rng.standard_normal((feat_dim, self.dim)) / np.sqrt(
                feat_dim
            )
        return self._proj[feat_dim]

    def embed(self, motion: MotionSequence) -> np.ndarray:
        frames = np.asarray(motion.frames, dtype=float)
        feats = np.concatenate([frames.mean(axis=0), frames.std(axis=0)])
        vec = feats @ self._projection(feats.size)
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def embed_many(self, motions) -> np.ndarray:
        return np.stack([self.embed(m) for m in motions])

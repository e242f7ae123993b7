"""Embedding-space metrics: FID, R-precision, MM-Dist, Diversity, MModality."""

from __future__ import annotations

import numpy as np

EIGVAL_TOLERANCE = -1e-8


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigen-decomposition.

    Eigenvalues below the tolerance raise; small negatives (numerical noise)
    clip to zero.
    """
    sym = 0.5 * (mat + mat.T)
    vals, vecs = np.linalg.eigh(sym)
    if vals.min() < EIGVAL_TOLERANCE:
        raise ValueError(f"matrix is not PSD within tolerance (min eig {vals.min():g})")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def fid(real: np.ndarray, gen: np.ndarray) -> float:
    """Frechet distance between Gaussians fitted to the two embedding sets.

    ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)), with the matrix square
    root computed in the symmetric form S1^(1/2) S2 S1^(1/2).
    """
    real = np.asarray(real, dtype=float)
    gen = np.asarray(gen, dtype=float)
    if real.ndim != 2 or gen.ndim != 2 or real.shape[1] != gen.shape[1]:
        raise ValueError("embedding sets must be 2-D with equal dimension")
    if real.shape[0] < 2 or gen.shape[0] < 2:
        raise ValueError("need at least two embeddings per set")
    mu1, mu2 = real.mean(axis=0), gen.mean(axis=0)
    s1 = np.cov(real, rowvar=False)
    s2 = np.cov(gen, rowvar=False)
    s1_half = _psd_sqrt(s1)
    inner = _psd_sqrt(s1_half @ s2 @ s1_half)
    mean_term = float(np.sum((mu1 - mu2) ** 2))
    trace_term = float(np.trace(s1) + np.trace(s2) - 2.0 * np.trace(inner))
    # the distance is non-negative; tiny negatives are eigen-decomposition
    # round-off (common for rank-deficient covariances)
    return max(mean_term + trace_term, 0.0)


def r_precision(
    motion_embeddings: np.ndarray,
    text_embeddings: np.ndarray,
    batch: int = 32,
    seed: int = 0,
) -> tuple:
    """Top-1/2/3 retrieval accuracy of each motion's own caption among
    ``batch``-1 seeded distractor captions (Euclidean distances)."""
    m = np.asarray(motion_embeddings, dtype=float)
    t = np.asarray(text_embeddings, dtype=float)
    if m.shape != t.shape:
        raise ValueError("motion and text embeddings must pair up")
    n = m.shape[0]
    if n < batch:
        raise ValueError(f"need at least {batch} items, got {n}")
    rng = np.random.default_rng(seed)
    hits = np.zeros(3)
    for i in range(n):
        others = rng.choice(n - 1, size=batch - 1, replace=False)
        others = np.where(others >= i, others + 1, others)
        d_gt = np.linalg.norm(m[i] - t[i])
        d_others = np.linalg.norm(m[i] - t[others], axis=1)
        rank = 1 + int(np.sum(d_others < d_gt))
        for k in range(3):
            hits[k] += rank <= k + 1
    top1, top2, top3 = hits / n
    return float(top1), float(top2), float(top3)


def mm_dist(motion_embeddings: np.ndarray, text_embeddings: np.ndarray) -> float:
    """Mean Euclidean distance between paired motion/text embeddings."""
    m = np.asarray(motion_embeddings, dtype=float)
    t = np.asarray(text_embeddings, dtype=float)
    if m.shape != t.shape:
        raise ValueError("motion and text embeddings must pair up")
    return float(np.mean(np.linalg.norm(m - t, axis=1)))


def _distinct_pairs(rng, n: int, count: int):
    i = rng.integers(0, n, size=count)
    j = (i + 1 + rng.integers(0, n - 1, size=count)) % n
    return i, j


def diversity(embeddings: np.ndarray, pairs: int = 300, seed: int = 0) -> float:
    """Mean distance over seeded random pairs of distinct indices."""
    e = np.asarray(embeddings, dtype=float)
    if e.shape[0] < 2:
        raise ValueError("need at least two embeddings")
    rng = np.random.default_rng(seed)
    i, j = _distinct_pairs(rng, e.shape[0], pairs)
    return float(np.mean(np.linalg.norm(e[i] - e[j], axis=1)))


def mmodality(per_caption_sets, pairs: int = 10, seed: int = 0) -> float:
    """Mean within-caption pair distance, averaged over captions.

    Each entry of ``per_caption_sets`` holds the embeddings of motions
    synthesized from one caption (at least two per caption).
    """
    rng = np.random.default_rng(seed)
    means = []
    for emb in per_caption_sets:
        e = np.asarray(emb, dtype=float)
        if e.shape[0] < 2:
            raise ValueError("each caption set needs at least two motions")
        i, j = _distinct_pairs(rng, e.shape[0], pairs)
        means.append(np.mean(np.linalg.norm(e[i] - e[j], axis=1)))
    return float(np.mean(means))

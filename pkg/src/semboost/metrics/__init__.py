from .distribution import diversity, fid, mm_dist, mmodality, r_precision
from .status import (
    StatusHistogram,
    histogram_from_words,
    histogram_cosine,
    motion_histogram,
    paired_status_similarity,
    status_similarity,
)
from .embedders import ToyMotionEmbedder
from .report import MetricReport

__all__ = [
    "fid",
    "r_precision",
    "mm_dist",
    "diversity",
    "mmodality",
    "StatusHistogram",
    "histogram_from_words",
    "histogram_cosine",
    "motion_histogram",
    "status_similarity",
    "paired_status_similarity",
    "ToyMotionEmbedder",
    "MetricReport",
]

from .schedule import NoiseSchedule, cosine_schedule, q_sample
from .training import (
    TrainConfig,
    AdamW,
    EmaTracker,
    Trainer,
    DataStats,
    MotionTextDataset,
    lr_at,
    train,
)
from .sampling import SamplerConfig, guided_predict, sample, sample_batch

__all__ = [
    "NoiseSchedule",
    "cosine_schedule",
    "q_sample",
    "TrainConfig",
    "AdamW",
    "EmaTracker",
    "Trainer",
    "DataStats",
    "MotionTextDataset",
    "lr_at",
    "train",
    "SamplerConfig",
    "guided_predict",
    "sample",
    "sample_batch",
]

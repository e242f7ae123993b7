"""Aggregated metric report emitted by the eval pipeline."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


@dataclass
class MetricReport:
    fid: float | None = None
    r_top1: float | None = None
    r_top2: float | None = None
    r_top3: float | None = None
    mm_dist: float | None = None
    diversity: float | None = None
    mmodality: float | None = None
    ts: float | None = None
    hos: float | None = None
    lfs: float | None = None
    counts: dict = field(default_factory=dict)

    def validate(self) -> None:
        for name in ("r_top1", "r_top2", "r_top3", "ts", "hos", "lfs"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.fid is not None and self.fid < -1e-9:
            raise ValueError(f"fid={self.fid} negative")
        tops = [self.r_top1, self.r_top2, self.r_top3]
        if all(v is not None for v in tops):
            if not (tops[0] <= tops[1] + 1e-12 and tops[1] <= tops[2] + 1e-12):
                raise ValueError("top-k accuracies must be non-decreasing in k")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)

    def csv_row(self) -> tuple:
        header = [
            "fid", "r_top1", "r_top2", "r_top3", "mm_dist", "diversity",
            "mmodality", "ts", "hos", "lfs",
        ]
        values = [getattr(self, h) for h in header]
        return header, values

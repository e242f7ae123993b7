"""Checkpoint format: JSON manifest + raw little-endian float32 blob.

The manifest records the model config, parameter names/shapes in blob
order, the training step and any extra named arrays (EMA weights, dataset
normalization stats). The blob concatenates the flat parameter buffer and
the extras in manifest order.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .denoiser import Denoiser, DenoiserConfig

FORMAT_NAME = "semboost-checkpoint-v1"


def save_checkpoint(base, model: Denoiser, step: int, extras: dict | None = None,
                    meta: dict | None = None):
    """Write <base>.json / <base>.bin; extras are named float arrays and
    ``meta`` is free-form JSON (fps, diffusion steps, ...)."""
    base = Path(base)
    extras = extras or {}
    manifest = {
        "format": FORMAT_NAME,
        "config": dataclasses.asdict(model.config),
        "step": int(step),
        "dtype": "float32",
        "meta": meta or {},
        "params": [
            {"name": n, "shape": list(s)} for n, s in model.store.shapes()
        ],
        "extras": [
            {"name": name, "shape": list(np.asarray(arr).shape)}
            for name, arr in extras.items()
        ],
    }
    parts = [np.ascontiguousarray(model.store.flat, dtype="<f4")]
    for name, arr in extras.items():
        parts.append(np.ascontiguousarray(np.asarray(arr).ravel(), dtype="<f4"))
    blob = np.concatenate(parts) if parts else np.empty(0, dtype="<f4")
    base.parent.mkdir(parents=True, exist_ok=True)
    base.with_suffix(".json").write_text(json.dumps(manifest, indent=1) + "\n")
    base.with_suffix(".bin").write_bytes(blob.tobytes())


def load_checkpoint(base, dtype=np.float32):
    """Rebuild the model (zero-init, then overwritten) plus step and extras."""
    base = Path(base)
    if base.suffix == ".json":
        base = base.with_suffix("")
    manifest = json.loads(base.with_suffix(".json").read_text())
    if manifest.get("format") != FORMAT_NAME:
        raise ValueError(f"{base}: not a checkpoint manifest")
    config = DenoiserConfig(**manifest["config"])
    model = Denoiser(config, seed=0, dtype=dtype)

    raw = np.frombuffer(base.with_suffix(".bin").read_bytes(), dtype="<f4")
    sizes = [int(np.prod(p["shape"])) if p["shape"] else 1 for p in manifest["params"]]
    n_params = sum(sizes)
    expected_names = [p["name"] for p in manifest["params"]]
    if expected_names != model.store.names():
        raise ValueError(f"{base}: parameter names do not match the config build")
    model.store.load_flat(raw[:n_params].astype(dtype))

    extras = {}
    offset = n_params
    for entry in manifest["extras"]:
        size = int(np.prod(entry["shape"])) if entry["shape"] else 1
        extras[entry["name"]] = (
            raw[offset : offset + size].astype(np.float64).reshape(entry["shape"])
        )
        offset += size
    if offset != raw.size:
        raise ValueError(f"{base}: blob size mismatch")
    return model, int(manifest["step"]), extras, manifest.get("meta", {})

"""Run manifests: what ran, with which options, and what it produced."""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class RunManifest:
    subcommand: str
    options: dict  # effective options after config-file merging; flags win
    seed: int | None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)  # relative path -> sha256
    wall_clock_seconds: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def hash_tree(root, exclude=("manifest.json",)) -> dict:
    """sha256 of every file under ``root`` keyed by relative path."""
    root = Path(root)
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.name not in exclude:
            out[path.relative_to(root).as_posix()] = sha256_file(path)
    return out


def write_manifest_atomic(path, manifest: RunManifest) -> None:
    """Write via a temp file + rename so readers never see a partial one."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(manifest.to_json() + "\n")
    os.replace(tmp, path)


class ManifestTimer:
    """Context helper: collects inputs/outputs, times the run, writes at
    exit."""

    def __init__(self, subcommand: str, options: dict, seed=None, path=None):
        self.manifest = RunManifest(
            subcommand=subcommand, options=dict(options), seed=seed
        )
        self.path = Path(path) if path else None
        self._t0 = time.perf_counter()

    def add_input(self, name: str, path) -> None:
        p = Path(path)
        self.manifest.inputs[name] = str(p)

    def finish(self, output_root=None, output_files=None) -> RunManifest:
        if output_root is not None:
            self.manifest.outputs = hash_tree(output_root)
        elif output_files:
            self.manifest.outputs = {
                Path(p).name: sha256_file(p) for p in output_files
            }
        self.manifest.wall_clock_seconds = time.perf_counter() - self._t0
        if self.path:
            write_manifest_atomic(self.path, self.manifest)
        return self.manifest

"""On-disk formats: JSON header + raw little-endian float32 binary.

A motion ``foo`` is the pair ``foo.json``/``foo.bin``. The header carries
n_frames, dim, fps, joint_count and rotation_span; joint files reuse the
scheme with dim = 3*J and rotation_span = 0. Values are row-major float32.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .layout import RepresentationLayout
from .types import GlobalJoints, MotionSequence


def _write_pair(base: Path, header: dict, data: np.ndarray) -> None:
    base.parent.mkdir(parents=True, exist_ok=True)
    blob = np.ascontiguousarray(data, dtype="<f4").tobytes()
    base.with_suffix(".bin").write_bytes(blob)
    base.with_suffix(".json").write_text(json.dumps(header, sort_keys=True) + "\n")


def _read_pair(base: Path) -> tuple[dict, np.ndarray]:
    header = json.loads(base.with_suffix(".json").read_text())
    raw = np.frombuffer(base.with_suffix(".bin").read_bytes(), dtype="<f4")
    n, d = int(header["n_frames"]), int(header["dim"])
    if raw.size != n * d:
        raise ValueError(f"{base}: binary holds {raw.size} floats, header says {n * d}")
    return header, raw.reshape(n, d).astype(np.float64)


def save_motion(base, motion: MotionSequence) -> None:
    header = {
        "n_frames": motion.n_frames,
        "dim": motion.layout.dim,
        "fps": motion.fps,
        "joint_count": motion.layout.joint_count,
        "rotation_span": motion.layout.rotation_span,
    }
    _write_pair(Path(base), header, motion.frames)


def load_motion(base) -> MotionSequence:
    header, data = _read_pair(Path(base))
    layout = RepresentationLayout(
        joint_count=int(header["joint_count"]),
        rotation_span=int(header["rotation_span"]),
    )
    if layout.dim != int(header["dim"]):
        raise ValueError(f"{base}: dim {header['dim']} does not match layout")
    return MotionSequence(frames=data, fps=float(header["fps"]), layout=layout)


def save_joints(base, joints: GlobalJoints) -> None:
    n, j, _ = joints.positions.shape
    header = {
        "n_frames": n,
        "dim": 3 * j,
        "fps": joints.fps,
        "joint_count": j,
        "rotation_span": 0,
    }
    _write_pair(Path(base), header, joints.positions.reshape(n, 3 * j))


def load_joints(base) -> GlobalJoints:
    header, data = _read_pair(Path(base))
    j = int(header["joint_count"])
    if int(header["rotation_span"]) != 0:
        raise ValueError(f"{base}: not a joints file")
    return GlobalJoints(
        positions=data.reshape(-1, j, 3), fps=float(header["fps"])
    )


def is_joints_header(base) -> bool:
    header = json.loads(Path(base).with_suffix(".json").read_text())
    return int(header.get("rotation_span", -1)) == 0


def list_ids(directory) -> list[str]:
    """Sorted stems of all header/binary pairs in a directory."""
    directory = Path(directory)
    ids = sorted(
        p.stem for p in directory.glob("*.json") if p.with_suffix(".bin").exists()
    )
    return ids


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path, "r") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def write_jsonl(path, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

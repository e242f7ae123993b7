"""Subcommand implementations behind the ``semboost`` executable.

Exit codes: 0 success, 1 validation/usage error, 2 runtime failure. Every
subcommand accepts --config (JSON defaults; explicit flags win) and --seed,
and writes a run manifest next to its outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import geometry
from .diffusion import (
    MotionTextDataset,
    SamplerConfig,
    TrainConfig,
    cosine_schedule,
    sample_batch,
    train,
)
from .manifest import ManifestTimer
from .metrics import (
    MetricReport,
    ToyMotionEmbedder,
    diversity,
    fid,
    mm_dist,
    mmodality,
    paired_status_similarity,
    r_precision,
)
from .motion import io as mio
from .motion import rotate_augment, decode, encode, layout_263, layout_269
from .motion.types import GlobalJoints
from .net import Denoiser, DenoiserConfig, load_checkpoint, save_checkpoint
from .semantics import TranslatorConfig, combine, status_timeline
from .synth import CANONICAL_SKELETON, N_BODY_JOINTS, make_corpus
from .synth.generator import restore_face_landmarks
from .synth.skeleton import FACE_OFFSETS, HEAD_JOINT
from .textembed import ToyTextEmbedder, get_embedder


class CliError(Exception):
    """Raised for validation problems; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; the contract is 1
        raise CliError(f"{self.prog}: {message}")


def _load_config(path) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {p}")
    return json.loads(p.read_text())


def _opt(args, config: dict, key: str, default=None):
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    return config.get(key, default)


def _translator_from(args, config) -> TranslatorConfig:
    return TranslatorConfig(
        forward_threshold=float(_opt(args, config, "mu", 0.85)),
        deadzone=float(_opt(args, config, "deadzone", 0.15)),
        downsample=int(_opt(args, config, "downsample", 10)),
    )


# --------------------------------------------------------------------- synth


def cmd_synth(args) -> int:
    config = _load_config(args.config)
    n = int(_opt(args, config, "n", 8))
    seed = int(_opt(args, config, "seed", 0))
    fps = float(_opt(args, config, "fps", 20.0))
    max_segments = int(_opt(args, config, "max-segments", 2))
    min_duration = int(_opt(args, config, "min-duration", 14))
    max_duration = int(_opt(args, config, "max-duration", 22))
    out = Path(args.out)
    options = {
        "n": n, "seed": seed, "fps": fps, "max-segments": max_segments,
        "min-duration": min_duration, "max-duration": max_duration,
        "out": str(out),
    }
    timer = ManifestTimer("synth", options, seed=seed, path=out / "manifest.json")

    items = make_corpus(
        n, seed=seed, fps=fps, max_segments=max_segments,
        min_duration=min_duration, max_duration=max_duration,
    )
    captions, labels = [], []
    for item in items:
        mio.save_motion(out / "motions" / item.item_id, item.motion)
        captions.append({"id": item.item_id, "text": item.caption})
        labels.append({"id": item.item_id, **item.generated.labels})
    mio.write_jsonl(out / "captions.jsonl", captions)
    mio.write_jsonl(out / "labels.jsonl", labels)
    timer.finish(output_root=out)
    print(f"wrote {n} motions to {out}")
    return 0


# ------------------------------------------------------------------- enhance


def cmd_enhance(args) -> int:
    config = _load_config(args.config)
    motions_dir = Path(args.motions)
    captions_path = Path(args.captions)
    out = Path(args.out)
    if not motions_dir.is_dir():
        raise CliError(f"motions directory not found: {motions_dir}")
    if not captions_path.exists():
        raise CliError(f"captions file not found: {captions_path}")
    translator = _translator_from(args, config)
    options = {
        "motions": str(motions_dir), "captions": str(captions_path),
        "out": str(out), "mu": translator.forward_threshold,
        "deadzone": translator.deadzone, "downsample": translator.downsample,
    }
    timer = ManifestTimer(
        "enhance", options, seed=None,
        path=out.parent / (out.name + ".manifest.json"),
    )
    timer.add_input("motions", motions_dir)
    timer.add_input("captions", captions_path)

    rows = []
    for entry in mio.read_jsonl(captions_path):
        motion = mio.load_motion(motions_dir / entry["id"])
        joints = restore_face_landmarks(motion)
        timeline = status_timeline(joints, CANONICAL_SKELETON, translator)
        enhanced = combine(entry["text"], timeline.statuses)
        rows.append(
            {"id": entry["id"], "text": enhanced.text, "parts": timeline.statuses}
        )
    mio.write_jsonl(out, rows)
    timer.finish(output_files=[out])
    print(f"enhanced {len(rows)} captions -> {out}")
    return 0


# ------------------------------------------------------------------- augment


def cmd_augment(args) -> int:
    motions_dir = Path(args.motions)
    out = Path(args.out)
    k = int(args.k)
    options = {"motions": str(motions_dir), "k": k, "out": str(out)}
    timer = ManifestTimer("augment", options, seed=None, path=out / "manifest.json")
    ids = mio.list_ids(motions_dir)
    if not ids:
        raise CliError(f"no motion files in {motions_dir}")
    for item_id in ids:
        motion = mio.load_motion(motions_dir / item_id)
        mio.save_motion(out / item_id, rotate_augment(motion, k))
    timer.finish(output_root=out)
    print(f"rotated {len(ids)} motions by {k * 90} degrees -> {out}")
    return 0


# -------------------------------------------------------------- encode/decode


def _derive_rotations(positions: np.ndarray) -> np.ndarray:
    """World orientations for bare joints: pure yaw from the torso normal,
    plus a proper head orientation when face landmarks are present."""
    n, j, _ = positions.shape
    neck = positions[:, 12]
    normal = np.cross(neck - positions[:, 16], neck - positions[:, 17])
    yaw = geometry.compass_azimuth(normal)
    base = geometry.yaw_matrix(yaw)
    rot = np.repeat(base[:, None, :, :], j, axis=1)
    if j >= 27:
        nose = positions[:, 22]
        mid_eye = 0.5 * (positions[:, 23] + positions[:, 24])
        mid_ear = 0.5 * (positions[:, 25] + positions[:, 26])
        t = 0.5 * (nose + mid_eye) - mid_ear
        rot[:, HEAD_JOINT] = geometry.rotation_from_z(t)
    return rot


def cmd_encode(args) -> int:
    joints_dir = Path(args.joints)
    out = Path(args.out)
    layout = layout_263() if int(args.layout) == 263 else layout_269()
    options = {"joints": str(joints_dir), "out": str(out), "layout": layout.dim}
    timer = ManifestTimer("encode", options, seed=None, path=out / "manifest.json")
    ids = mio.list_ids(joints_dir)
    if not ids:
        raise CliError(f"no joints files in {joints_dir}")
    for item_id in ids:
        joints = mio.load_joints(joints_dir / item_id)
        rotations = _derive_rotations(joints.positions)
        body = GlobalJoints(
            positions=joints.positions[:, :N_BODY_JOINTS], fps=joints.fps
        )
        mio.save_motion(
            out / item_id, encode(body, rotations[:, :N_BODY_JOINTS], layout)
        )
    timer.finish(output_root=out)
    print(f"encoded {len(ids)} clips -> {out}")
    return 0


def cmd_decode(args) -> int:
    motions_dir = Path(args.motions)
    out = Path(args.out)
    options = {"motions": str(motions_dir), "out": str(out), "face": bool(args.face)}
    timer = ManifestTimer("decode", options, seed=None, path=out / "manifest.json")
    ids = mio.list_ids(motions_dir)
    if not ids:
        raise CliError(f"no motion files in {motions_dir}")
    for item_id in ids:
        motion = mio.load_motion(motions_dir / item_id)
        joints = restore_face_landmarks(motion) if args.face else decode(motion)
        mio.save_joints(out / item_id, joints)
    timer.finish(output_root=out)
    print(f"decoded {len(ids)} clips -> {out}")
    return 0


# --------------------------------------------------------------------- train


def _build_embedder(spec):
    if isinstance(spec, str):
        return get_embedder(spec)
    if isinstance(spec, dict):
        return get_embedder(spec["name"], spec.get("dir"))
    raise CliError(f"bad embedder spec: {spec!r}")


def cmd_train(args) -> int:
    config = _load_config(args.config)
    if not config:
        raise CliError("train requires --config with dataset paths")
    motions_dir = Path(config["motions"])
    captions_path = Path(config["captions"])
    out = Path(args.out)
    seed = int(args.seed if args.seed is not None else config.get("seed", 0))
    options = {
        "config": str(args.config), "out": str(out), "seed": seed,
        "motions": str(motions_dir), "captions": str(captions_path),
    }
    timer = ManifestTimer("train", options, seed=seed, path=out / "manifest.json")
    timer.add_input("motions", motions_dir)
    timer.add_input("captions", captions_path)

    embedder = _build_embedder(config.get("embedder", "toy"))
    rows = mio.read_jsonl(captions_path)
    pairs, ids = [], []
    for row in rows:
        motion = mio.load_motion(motions_dir / row["id"])
        pairs.append((motion, row["text"]))
        ids.append(row["id"])
    dataset = MotionTextDataset.from_pairs(pairs, embedder, ids=ids)

    fps = float(config.get("fps", 20.0))
    model_cfg = DenoiserConfig(**config.get("model", {}))
    train_overrides = dict(config.get("train", {}))
    if "adam_betas" in train_overrides:
        train_overrides["adam_betas"] = tuple(train_overrides["adam_betas"])
    train_overrides["seed"] = seed
    if args.steps is not None:
        train_overrides["total_steps"] = int(args.steps)
    train_cfg = TrainConfig(**train_overrides)

    schedule = cosine_schedule(int(config.get("diffusion_steps", 1000)))
    model = Denoiser(model_cfg, seed=seed)
    stats = dataset.compute_stats()

    out.mkdir(parents=True, exist_ok=True)
    metrics_path = out / "metrics.csv"
    checkpoint_every = int(config.get("checkpoint_every", 0))
    extras_base = {
        "data_mean": stats.mean, "data_std": stats.std,
        "data_min": stats.vmin, "data_max": stats.vmax,
    }
    meta = {"fps": fps, "diffusion_steps": schedule.total_steps, "seed": seed}

    with open(metrics_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "loss", "lr"])
        trainer_holder = {}

        def on_step(step, loss, lr):
            writer.writerow([step, f"{loss:.6f}", f"{lr:.8g}"])
            if checkpoint_every and step % checkpoint_every == 0:
                save_checkpoint(
                    out / f"ckpt_{step:06d}", model, step,
                    extras={**extras_base, "ema": trainer_holder["t"].ema.shadow},
                    meta=meta,
                )

        trainer, losses = _train_with_holder(
            model, dataset, schedule, train_cfg, stats, on_step, trainer_holder
        )
    save_checkpoint(
        out / "ckpt_final", model, trainer.step_count,
        extras={**extras_base, "ema": trainer.ema.shadow}, meta=meta,
    )
    timer.finish(output_root=out)
    print(
        f"trained {trainer.step_count} steps; "
        f"final loss {losses[-1]:.4f} -> {out}"
    )
    return 0


def _train_with_holder(model, dataset, schedule, cfg, stats, on_step, holder):
    from .diffusion.training import Trainer, collate, lr_at

    trainer = Trainer(model, schedule, cfg, stats)
    holder["t"] = trainer
    losses = []
    n = len(dataset)
    for _ in range(cfg.total_steps):
        idx = trainer.rng.integers(0, n, size=cfg.batch_size)
        batch = collate(dataset, idx, stats, dtype=model.store.dtype)
        loss = trainer.train_step(batch)
        losses.append(loss)
        on_step(trainer.step_count, loss, lr_at(trainer.step_count, cfg))
    return trainer, losses


# -------------------------------------------------------------------- sample


def cmd_sample(args) -> int:
    ckpt = Path(args.ckpt)
    out = Path(args.out)
    seed = int(args.seed if args.seed is not None else 0)
    count = int(args.count)
    options = {
        "ckpt": str(ckpt), "text": args.text, "frames": int(args.frames),
        "seed": seed, "count": count, "guidance": float(args.guidance),
        "steps": args.steps, "out": str(out), "use-ema": not args.no_ema,
    }
    timer = ManifestTimer("sample", options, seed=seed, path=out / "manifest.json")
    timer.add_input("ckpt", ckpt)

    model, _, extras, meta = load_checkpoint(ckpt)
    if not args.no_ema and "ema" in extras:
        model.store.load_flat(extras["ema"].astype(model.store.dtype))
    from .diffusion.training import DataStats

    stats = DataStats(
        mean=extras["data_mean"], std=extras["data_std"],
        vmin=extras["data_min"], vmax=extras["data_max"],
    )
    schedule = cosine_schedule(int(meta.get("diffusion_steps", 1000)))
    sampler = SamplerConfig(
        guidance_scale=float(args.guidance),
        num_steps=int(args.steps) if args.steps is not None else None,
        seed=seed,
    )
    cond = ToyTextEmbedder().embed(args.text)
    layout = layout_269() if model.config.feature_dim == 269 else layout_263()
    motions = sample_batch(
        model, [cond] * count, int(args.frames), schedule, sampler, stats,
        layout, fps=float(meta.get("fps", 20.0)),
    )
    for i, motion in enumerate(motions):
        mio.save_motion(out / f"sample_{i:03d}", motion)
    timer.finish(output_root=out)
    print(f"sampled {count} motion(s) -> {out}")
    return 0


# ---------------------------------------------------------------------- eval


def _group_base(item_id: str) -> str:
    return item_id.split("__", 1)[0]


def cmd_eval(args) -> int:
    real_dir = Path(args.real)
    gen_dir = Path(args.gen)
    captions_path = Path(args.captions)
    out = Path(args.out)
    seed = int(args.seed if args.seed is not None else 0)
    options = {
        "real": str(real_dir), "gen": str(gen_dir),
        "captions": str(captions_path), "out": str(out), "seed": seed,
    }
    timer = ManifestTimer(
        "eval", options, seed=seed,
        path=out.parent / (out.name + ".manifest.json"),
    )

    captions = {row["id"]: row["text"] for row in mio.read_jsonl(captions_path)}
    real_ids = mio.list_ids(real_dir)
    gen_ids = mio.list_ids(gen_dir)
    if not real_ids or not gen_ids:
        raise CliError("need motions in both --real and --gen")

    paired = [
        (rid, rid) for rid in real_ids
        if rid in set(gen_ids) and rid in captions
    ]
    # generated ids may carry a __k suffix: pair those with their base id
    if not paired:
        paired = [
            (_group_base(gid), gid) for gid in gen_ids
            if _group_base(gid) in set(real_ids) and _group_base(gid) in captions
        ]
    if not paired:
        raise CliError("no paired ids across --real/--gen/--captions")

    real_motions = [mio.load_motion(real_dir / rid) for rid, _ in paired]
    gen_motions = [mio.load_motion(gen_dir / gid) for _, gid in paired]

    motion_embedder = ToyMotionEmbedder()
    text_embedder = ToyTextEmbedder()
    real_emb = motion_embedder.embed_many(real_motions)
    gen_emb = motion_embedder.embed_many(gen_motions)
    text_emb = np.stack(
        [text_embedder.embed(captions[rid]).sentence for rid, _ in paired]
    )

    report = MetricReport(counts={"pairs": len(paired)})
    report.fid = fid(real_emb, gen_emb)
    report.mm_dist = mm_dist(gen_emb, text_emb)
    if len(paired) >= 2:
        report.diversity = diversity(gen_emb, seed=seed)
    if len(paired) >= 32:
        report.r_top1, report.r_top2, report.r_top3 = r_precision(
            gen_emb, text_emb, seed=seed
        )
    groups: dict = {}
    for (rid, gid), emb in zip(paired, gen_emb):
        groups.setdefault(rid, []).append(emb)
    multi = [np.stack(v) for v in groups.values() if len(v) >= 2]
    if multi:
        report.mmodality = mmodality(multi, seed=seed)

    real_joints = [restore_face_landmarks(m) for m in real_motions]
    gen_joints = [restore_face_landmarks(m) for m in gen_motions]
    for field, part in (("ts", "body_direction"), ("hos", "head"), ("lfs", "left_hand")):
        setattr(
            report, field,
            paired_status_similarity(real_joints, gen_joints, part, CANONICAL_SKELETON),
        )
    report.validate()

    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n")
    header, values = report.csv_row()
    csv_path = out.with_suffix(".csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerow(["" if v is None else f"{v:.6f}" for v in values])
    timer.finish(output_files=[out, csv_path])
    print(report.to_json())
    return 0


# -------------------------------------------------------------------- parser


def build_parser() -> _Parser:
    parser = _Parser(prog="semboost", description=__doc__)
    parser.add_argument("--threads", help="worker/BLAS thread cap (env fallback SEMBOOST_THREADS)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; explicit flags win")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", help=argparse.SUPPRESS)

    p = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--fps", type=float, default=None)
    p.add_argument("--max-segments", type=int, default=None)
    p.add_argument("--min-duration", type=int, default=None)
    p.add_argument("--max-duration", type=int, default=None)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("enhance", help="append extracted status phrases to captions")
    common(p)
    p.add_argument("--motions", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--deadzone", type=float, default=None)
    p.add_argument("--downsample", type=int, default=None)
    p.set_defaults(handler=cmd_enhance)

    p = sub.add_parser("augment", help="rotate motions by k*90 degrees")
    common(p)
    p.add_argument("--motions", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_augment)

    p = sub.add_parser("encode", help="joints files -> feature motion files")
    common(p)
    p.add_argument("--joints", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--layout", type=int, default=269, choices=(263, 269))
    p.set_defaults(handler=cmd_encode)

    p = sub.add_parser("decode", help="feature motion files -> joints files")
    common(p)
    p.add_argument("--motions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--face", action="store_true",
                   help="append the canonical face landmarks")
    p.set_defaults(handler=cmd_decode)

    p = sub.add_parser("train", help="train the denoiser on a corpus")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=None)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("sample", help="synthesize motions from a caption")
    common(p)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--guidance", type=float, default=2.5)
    p.add_argument("--steps", type=int, default=None,
                   help="reverse steps (default: every schedule step)")
    p.add_argument("--no-ema", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("eval", help="metric report over paired real/generated dirs")
    common(p)
    p.add_argument("--real", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--captions", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_eval)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

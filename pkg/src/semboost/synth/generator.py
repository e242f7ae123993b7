"""Procedural, fully-labeled skeleton animation.

Every frame is posed rigidly from the template (whole-limb rotations and an
exact two-link arm IK), so bone lengths are constant by construction and the
part statuses realized are known from the script. Segment changes blend the
control parameters (yaw, speed, head direction, wrist targets) linearly over
a short window; those frames are flagged so oracle comparisons can skip
them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import geometry
from ..motion.codec import encode
from ..motion.layout import layout_269
from ..motion.types import GlobalJoints, MotionSequence
from ..semantics.combiner import EnhancedCaption, combine
from ..semantics.timeline import status_timeline
from ..semantics.translator import TranslatorConfig
from .script import HAND_AZIMUTH, HEAD_TARGET_DIRS, HEADING_YAW, MotionScript, random_script
from .skeleton import (
    CANONICAL_SKELETON,
    FACE_OFFSETS,
    FOREARM,
    HEAD_JOINT,
    N_BODY_JOINTS,
    N_JOINTS,
    ROOT_HEIGHT,
    UPPER_ARM,
    template_pose,
)

WALK_SPEED = 1.2  # m/s
TRANSITION_FRAMES = 5
STEP_FREQUENCY = 1.6  # gait cycles per second while walking
BOB_AMPLITUDE = 0.015
SWING_AMPLITUDE = 0.35

_TEMPLATE = template_pose()
_LEG_CHAINS = {"left": (1, 4, 7, 10), "right": (2, 5, 8, 11)}
_ARMS = {
    "left": (16, 18, 20),
    "right": (17, 19, 21),
}
_RAISE_OFFSET = {
    "left": np.array([-0.04, 0.18, 0.12]),
    "right": np.array([0.04, 0.18, 0.12]),
}
_HAND_BASE_HEIGHT = 0.10
_HAND_RADIUS = 0.34
_HAND_MIN_RADIUS = 0.12


def _wrist_target_body(side: str, word: str) -> np.ndarray:
    """Pelvis-relative wrist target in the yaw-aligned body frame."""
    shoulder = _TEMPLATE[_ARMS[side][0]]
    if word == "raise-up":
        return shoulder + _RAISE_OFFSET[side]
    azimuth = HAND_AZIMUTH[word]
    direction = np.array([np.sin(azimuth), 0.0, np.cos(azimuth)])
    base = np.array([0.0, _HAND_BASE_HEIGHT, 0.0])
    # largest radius along the sector-center ray the arm can reach
    reach = 0.95 * (UPPER_ARM + FOREARM)
    rel = base - shoulder
    b = float(rel @ direction)
    disc = b * b - float(rel @ rel) + reach * reach
    r_max = -b + np.sqrt(max(disc, 0.0))
    radius = float(np.clip(r_max, _HAND_MIN_RADIUS, _HAND_RADIUS))
    return base + radius * direction


def _solve_elbow(shoulder, wrist):
    """Two-link IK elbow with exact segment lengths."""
    delta = wrist - shoulder
    d = np.linalg.norm(delta)
    u = delta / d
    cos_bend = np.clip(
        (UPPER_ARM**2 + d**2 - FOREARM**2) / (2.0 * UPPER_ARM * d), -1.0, 1.0
    )
    sin_bend = np.sqrt(1.0 - cos_bend**2)
    normal = np.cross(u, np.array([0.0, 1.0, 0.0]))
    if np.linalg.norm(normal) < 1e-8:
        normal = np.cross(u, np.array([0.0, 0.0, 1.0]))
    normal /= np.linalg.norm(normal)
    return shoulder + UPPER_ARM * (cos_bend * u + sin_bend * normal)


def _lerp_angle(a: float, b: float, alpha: float) -> float:
    return a + float(geometry.wrap_angle(b - a)) * alpha


@dataclass(frozen=True)
class GeneratedMotion:
    joints: GlobalJoints  # (n, 27, 3) including face landmarks
    rotations: np.ndarray  # (n, 27, 3, 3) world orientations
    labels: dict  # per-part ground-truth words per frame + transition flags
    caption: str


def _parameter_streams(script: MotionScript):
    n = script.n_frames
    yaw = np.zeros(n)
    speed = np.zeros(n)
    head_dir = np.zeros((n, 3))
    wrist_l = np.zeros((n, 3))
    wrist_r = np.zeros((n, 3))
    swing = np.zeros(n)
    labels = {part: [None] * n for part in
              ("body_direction", "head", "left_hand", "right_hand")}
    transition = np.zeros(n, dtype=bool)

    def seg_params(seg):
        return (
            HEADING_YAW[seg.heading],
            WALK_SPEED if seg.locomotion == "walk" else 0.0,
            np.asarray(HEAD_TARGET_DIRS[seg.head], dtype=float),
            _wrist_target_body("left", seg.left_hand),
            _wrist_target_body("right", seg.right_hand),
            SWING_AMPLITUDE if seg.locomotion == "walk" else 0.0,
        )

    start = 0
    prev = None
    for seg in script.segments:
        cur = seg_params(seg)
        end = start + seg.duration  # frames [start, end); final frame added below
        for f in range(start, min(end, n)):
            if prev is not None and f - start < TRANSITION_FRAMES:
                alpha = (f - start + 1) / TRANSITION_FRAMES
                transition[f] = True
                yaw[f] = _lerp_angle(prev[0], cur[0], alpha)
                speed[f] = prev[1] + (cur[1] - prev[1]) * alpha
                head_dir[f] = prev[2] + (cur[2] - prev[2]) * alpha
                wrist_l[f] = prev[3] + (cur[3] - prev[3]) * alpha
                wrist_r[f] = prev[4] + (cur[4] - prev[4]) * alpha
                swing[f] = prev[5] + (cur[5] - prev[5]) * alpha
            else:
                yaw[f], speed[f], head_dir[f] = cur[0], cur[1], cur[2]
                wrist_l[f], wrist_r[f], swing[f] = cur[3], cur[4], cur[5]
            for part, word in (
                ("body_direction", seg.heading),
                ("head", seg.head),
                ("left_hand", seg.left_hand),
                ("right_hand", seg.right_hand),
            ):
                labels[part][f] = word
        start = end
        prev = cur

    # final fence-post frame continues the last segment
    last = script.segments[-1]
    yaw[-1], speed[-1], head_dir[-1] = prev[0], prev[1], prev[2]
    wrist_l[-1], wrist_r[-1], swing[-1] = prev[3], prev[4], prev[5]
    for part, word in (
        ("body_direction", last.heading),
        ("head", last.head),
        ("left_hand", last.left_hand),
        ("right_hand", last.right_hand),
    ):
        labels[part][-1] = word

    head_dir /= np.linalg.norm(head_dir, axis=1, keepdims=True)
    labels["transition"] = transition.tolist()
    return yaw, speed, head_dir, wrist_l, wrist_r, swing, labels


def generate(
    script: MotionScript,
    skeleton=CANONICAL_SKELETON,
    fps: float = 20.0,
) -> GeneratedMotion:
    """Animate a script on the canonical skeleton.

    The root starts at the horizontal origin and advances at the (blended)
    walk speed along the body heading; the torso is rigidly yawed, legs swing
    as whole limbs, wrists sit exactly on their target points and the face
    landmarks realize the head-direction target.
    """
    yaw, speed, head_dir, wrist_l, wrist_r, swing, labels = _parameter_streams(script)
    n = script.n_frames
    dt = 1.0 / fps

    # root track: velocities at frame k move frame k -> k+1
    root = np.zeros((n, 3))
    phase = np.zeros(n)
    for k in range(1, n):
        heading_vec = np.array([np.sin(yaw[k - 1]), 0.0, np.cos(yaw[k - 1])])
        root[k, [0, 2]] = root[k - 1, [0, 2]] + speed[k - 1] * dt * heading_vec[[0, 2]]
        phase[k] = phase[k - 1] + STEP_FREQUENCY * dt * (speed[k - 1] / WALK_SPEED)
    bob = BOB_AMPLITUDE * speed / WALK_SPEED
    root[:, 1] = ROOT_HEIGHT + bob * np.sin(2.0 * np.pi * phase)

    pos = np.zeros((n, N_JOINTS, 3))
    rot = np.zeros((n, N_JOINTS, 3, 3))
    yaw_rot = geometry.yaw_matrix(yaw)

    # rigid torso, head base, hips
    pos[:] = np.einsum("nab,jb->nja", yaw_rot, _TEMPLATE) + root[:, None, :]
    rot[:] = yaw_rot[:, None, :, :]

    # swinging legs: rotate each chain about its hip, pitch axis
    swing_angle = swing * np.sin(2.0 * np.pi * phase)
    for side, sign in (("left", 1.0), ("right", -1.0)):
        hip, knee, ankle, foot = _LEG_CHAINS[side]
        alpha = sign * swing_angle
        c, s = np.cos(alpha), np.sin(alpha)
        pitch = np.zeros((n, 3, 3))
        pitch[:, 0, 0] = 1.0
        pitch[:, 1, 1] = c
        pitch[:, 1, 2] = -s
        pitch[:, 2, 1] = s
        pitch[:, 2, 2] = c
        chain_rot = np.einsum("nab,nbc->nac", yaw_rot, pitch)
        for j in (knee, ankle, foot):
            offset = _TEMPLATE[j] - _TEMPLATE[hip]
            pos[:, j] = pos[:, hip] + np.einsum("nab,b->na", chain_rot, offset)
        for j in (hip, knee, ankle, foot):
            rot[:, j] = chain_rot

    # arms: wrists on their body-frame targets, elbows from two-link IK
    for side, targets in (("left", wrist_l), ("right", wrist_r)):
        shoulder_j, elbow_j, wrist_j = _ARMS[side]
        wrist_world = np.einsum("nab,nb->na", yaw_rot, targets) + root
        pos[:, wrist_j] = wrist_world
        for k in range(n):
            pos[k, elbow_j] = _solve_elbow(pos[k, shoulder_j], wrist_world[k])

    # head orientation realizes the body-relative target direction
    normal = np.einsum("nab,b->na", yaw_rot, np.array([0.0, 0.0, 1.0]))
    to_z = geometry.rodrigues_to_z(normal)
    t_world = np.einsum("nba,nb->na", to_z, head_dir)  # M^T @ target
    head_rot = np.swapaxes(geometry.rodrigues_to_z(t_world), -1, -2)
    rot[:, HEAD_JOINT] = head_rot
    pos[:, N_BODY_JOINTS:] = (
        pos[:, HEAD_JOINT][:, None, :]
        + np.einsum("nab,jb->nja", head_rot, FACE_OFFSETS)
    )

    return GeneratedMotion(
        joints=GlobalJoints(positions=pos, fps=fps),
        rotations=rot,
        labels=labels,
        caption=script.caption,
    )


def restore_face_landmarks(motion: MotionSequence) -> GlobalJoints:
    """Decode a 22-joint motion and re-attach the canonical face landmarks.

    The landmarks ride rigidly on the head joint, whose world orientation is
    recovered from the rotation channels, so status extraction works on
    decoded (e.g. synthesized) motions.
    """
    from ..motion.codec import decode, decode_rotations

    joints = decode(motion)
    rotations = decode_rotations(motion)
    head_rot = rotations[:, HEAD_JOINT]
    face = (
        joints.positions[:, HEAD_JOINT][:, None, :]
        + np.einsum("nab,jb->nja", head_rot, FACE_OFFSETS)
    )
    full = np.concatenate([joints.positions, face], axis=1)
    return GlobalJoints(positions=full, fps=motion.fps)


@dataclass(frozen=True)
class CorpusItem:
    item_id: str
    script: MotionScript
    generated: GeneratedMotion
    motion: MotionSequence
    caption: str
    enhanced: EnhancedCaption


def make_corpus(
    n: int,
    seed: int,
    fps: float = 20.0,
    max_segments: int = 2,
    min_duration: int = 14,
    max_duration: int = 22,
    translator: TranslatorConfig | None = None,
    head_choices=None,
    hand_choices=None,
    caption_parts: str = "all",
) -> list:
    """Seeded corpus of encoded motions with plain and enhanced captions.

    Motions use the absolute-orientation layout; enhanced captions come from
    running the actual extractor pipeline on the generated joints. With
    ``caption_parts="random"`` each enhanced caption keeps the body clause
    and drops head/hand clauses at random, so shorter prompts (a caption
    naming only the facing, say) are in-distribution for a model trained on
    the corpus.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if caption_parts not in ("all", "random"):
        raise ValueError("caption_parts must be 'all' or 'random'")
    layout = layout_269()
    cfg = translator or TranslatorConfig()
    children = np.random.SeedSequence(seed).spawn(n)
    items = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        script = random_script(
            rng,
            max_segments=max_segments,
            min_duration=min_duration,
            max_duration=max_duration,
            seed=int(child.generate_state(1)[0]),
            head_choices=head_choices,
            hand_choices=hand_choices,
        )
        gen = generate(script, fps=fps)
        motion = encode(
            GlobalJoints(positions=gen.joints.positions[:, :N_BODY_JOINTS], fps=fps),
            gen.rotations[:, :N_BODY_JOINTS],
            layout,
        )
        timeline = status_timeline(gen.joints, CANONICAL_SKELETON, cfg)
        statuses = timeline.statuses
        if caption_parts == "random":
            kept = {"body_direction": statuses["body_direction"]}
            if rng.random() < 0.6:
                kept["head"] = statuses["head"]
            for hand in ("left_hand", "right_hand"):
                if rng.random() < 0.5:
                    kept[hand] = statuses[hand]
            statuses = kept
        enhanced = combine(gen.caption, statuses)
        items.append(
            CorpusItem(
                item_id=f"{i:05d}",
                script=script,
                generated=gen,
                motion=motion,
                caption=gen.caption,
                enhanced=enhanced,
            )
        )
    return items

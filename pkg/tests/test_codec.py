import numpy as np
import pytest

from semboost import geometry
from semboost.motion import (
    GlobalJoints,
    MotionSequence,
    decode,
    decode_rotations,
    encode,
    layout_263,
    layout_269,
)
from semboost.synth import N_BODY_JOINTS


def _standing_pose(n_frames=10, height=0.9):
    pose = np.zeros((n_frames, 22, 3))
    pose[:, :, 1] = np.linspace(0.0, 1.6, 22)  # arbitrary vertical stack
    pose[:, 0, 1] = height
    rot = np.broadcast_to(np.eye(3), (n_frames, 22, 3, 3)).copy()
    return GlobalJoints(positions=pose, fps=20.0), rot


def test_standing_still_has_zero_velocities():
    joints, rot = _standing_pose()
    seq = encode(joints, rot, layout_269())
    assert np.all(seq.frames[:, 0] == 0.0)  # yaw rate
    assert np.all(seq.frames[:, 1:3] == 0.0)  # planar velocity
    assert np.max(np.abs(seq.frames[:, seq.layout.velocities_slice])) < 1e-12
    assert np.all(seq.frames[:, seq.layout.contacts_slice] == 1.0)


def test_269_row_width():
    joints, rot = _standing_pose()
    assert encode(joints, rot, layout_269()).frames.shape[1] == 269
    assert encode(joints, rot, layout_263()).frames.shape[1] == 263


def test_encode_shape_validation():
    joints, rot = _standing_pose()
    with pytest.raises(ValueError):
        encode(joints, rot[:, :21], layout_269())
    short = GlobalJoints(positions=joints.positions[:, :21], fps=20.0)
    with pytest.raises(ValueError):
        encode(short, rot[:, :21], layout_269())


def test_roundtrip_on_synth_clips(small_corpus):
    for item in small_corpus:
        motion = item.motion
        recovered = decode(motion)
        original = item.generated.joints.positions[:, :N_BODY_JOINTS]
        err = np.max(np.abs(recovered.positions - original))
        assert err <= 1e-4, f"roundtrip error {err}"


def test_decode_zero_velocity_root_stays_put():
    layout = layout_263()
    frames = np.zeros((7, layout.dim))
    frames[:, 3] = 0.9
    # make every rotation block the identity's 6D form
    blocks = geometry.rotmat_to_cont6d(np.eye(3))
    frames[:, layout.rotations_slice] = np.tile(blocks, 21)
    joints = decode(MotionSequence(frames=frames, fps=20.0, layout=layout))
    np.testing.assert_allclose(
        joints.positions[:, 0], np.broadcast_to([0.0, 0.9, 0.0], (7, 3)), atol=1e-12
    )


def test_constant_yaw_rate_integrates_to_full_turn():
    layout = layout_263()
    n = 41  # 40 integration steps of pi/20 -> 2*pi
    frames = np.zeros((n, layout.dim))
    frames[:, 0] = np.pi / 20.0
    frames[:, 3] = 1.0
    frames[:, layout.rotations_slice] = np.tile(
        geometry.rotmat_to_cont6d(np.eye(3)), 21
    )
    seq = MotionSequence(frames=frames, fps=20.0, layout=layout)
    rots = decode_rotations(seq)
    final_yaw = geometry.yaw_of(rots[-1, 0])
    assert abs(geometry.wrap_angle(final_yaw - 2.0 * np.pi)) < 1e-6
    # halfway through the turn the root faces south
    mid_yaw = geometry.yaw_of(rots[20, 0])
    assert abs(abs(mid_yaw) - np.pi) < 1e-9


def test_absolute_layout_preserves_initial_facing(small_corpus):
    for item in small_corpus[:5]:
        rots = decode_rotations(item.motion)
        original = item.generated.rotations[:, :N_BODY_JOINTS]
        np.testing.assert_allclose(rots[0, 0], original[0, 0], atol=1e-9)


def test_initial_yaw_override():
    layout = layout_263()
    frames = np.zeros((4, layout.dim))
    frames[:, 1] = 0.1  # forward velocity in the yaw frame
    frames[:, 2] = 0.0
    frames[:, layout.rotations_slice] = np.tile(
        geometry.rotmat_to_cont6d(np.eye(3)), 21
    )
    seq = MotionSequence(frames=frames, fps=20.0, layout=layout)
    east = decode(seq, initial_yaw=np.pi / 2)
    # with yaw=pi/2 the local +x velocity points south (-z); root moves in -z
    assert east.positions[-1, 0, 2] < -0.25
    north = decode(seq)
    assert north.positions[-1, 0, 0] > 0.25

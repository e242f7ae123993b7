"""Channel layout of the per-frame motion feature vector.

A frame is the concatenation (r_ang_vel, r_vel_x, r_vel_z, r_height,
joint_positions, joint_rotations, joint_velocities, foot_contacts). With j
joints that is 4 + 3(j-1) + rotation_span + 3j + 4 channels: 263 for j=22
with per-joint rotations stored for the 21 non-root joints, 269 when the
root's absolute rotation is stored as the first 6D block as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class RepresentationLayout:
    joint_count: int
    rotation_span: int
    root_offset: int = field(init=False, default=0)

    def __post_init__(self):
        j = self.joint_count
        if j < 2:
            raise ValueError("need at least a root and one more joint")
        if self.rotation_span not in (6 * (j - 1), 6 * j):
            raise ValueError(
                f"rotation_span must be 6*(j-1) or 6*j for j={j}, "
                f"got {self.rotation_span}"
            )

    @property
    def includes_root_rotation(self) -> bool:
        return self.rotation_span == 6 * self.joint_count

    @property
    def positions_offset(self) -> int:
        return 4

    @property
    def rotations_offset(self) -> int:
        return 4 + 3 * (self.joint_count - 1)

    @property
    def velocities_offset(self) -> int:
        return self.rotations_offset + self.rotation_span

    @property
    def contacts_offset(self) -> int:
        return self.velocities_offset + 3 * self.joint_count

    @property
    def dim(self) -> int:
        return self.contacts_offset + 4

    # channel slices, in layout order
    @property
    def root_slice(self) -> slice:
        return slice(0, 4)

    @property
    def positions_slice(self) -> slice:
        return slice(self.positions_offset, self.rotations_offset)

    @property
    def rotations_slice(self) -> slice:
        return slice(self.rotations_offset, self.velocities_offset)

    @property
    def velocities_slice(self) -> slice:
        return slice(self.velocities_offset, self.contacts_offset)

    @property
    def contacts_slice(self) -> slice:
        return slice(self.contacts_offset, self.dim)

    def rotation_block(self, joint: int) -> slice:
        """Slice of the 6D rotation block for a joint index.

        With the absolute-root layout block 0 is the root; otherwise blocks
        start at joint 1 and the root has no block.
        """
        if self.includes_root_rotation:
            idx = joint
        else:
            if joint == 0:
                raise ValueError("layout stores no root rotation")
            idx = joint - 1
        start = self.rotations_offset + 6 * idx
        return slice(start, start + 6)


def layout_263() -> RepresentationLayout:
    return RepresentationLayout(joint_count=22, rotation_span=6 * 21)


def layout_269() -> RepresentationLayout:
    return RepresentationLayout(joint_count=22, rotation_span=6 * 22)

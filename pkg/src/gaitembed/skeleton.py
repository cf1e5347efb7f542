"""19-joint skeleton model and per-frame body normalization

A normalized frame is root-centered at the pelvis, divided by the subject height and rotated
into a body frame: x runs from the left to the right hip, z runs from the pelvis up the spine
to the neck, and y = z × x points forward.
"""
import math
from enum import IntEnum

import numpy as np

from gaitembed.errors import DegenerateFrame, InvalidParams, NoValidFrame


class JointId(IntEnum):
    """Fixed joint order of every skeleton array (rows of a gait tensor)"""
    Nose = 0
    LeftEye = 1
    RightEye = 2
    LeftEar = 3
    RightEar = 4
    Neck = 5
    LeftShoulder = 6
    RightShoulder = 7
    LeftElbow = 8
    RightElbow = 9
    LeftWrist = 10
    RightWrist = 11
    Pelvis = 12
    LeftHip = 13
    RightHip = 14
    LeftKnee = 15
    RightKnee = 16
    LeftAnkle = 17
    RightAnkle = 18


JOINT_COUNT = len(JointId)

ANCHOR_JOINTS = (JointId.Pelvis, JointId.Neck, JointId.LeftHip, JointId.RightHip)

MIN_SPINE_LENGTH = 1e-6  # meters
MIN_HIP_SPINE_ANGLE = math.radians(1.0)


class SkeletonFrame:  # pylint: disable=too-few-public-methods
    """One timestamped set of 3D joint positions (meters, world frame) with validity flags"""

    def __init__(self, timestamp, joints, valid=None):
        self.timestamp = float(timestamp)
        self.joints = np.asarray(joints, dtype=np.float64).reshape(JOINT_COUNT, 3)
        if valid is None:
            valid = np.ones(JOINT_COUNT, dtype=bool)
        self.valid = np.asarray(valid, dtype=bool).reshape(JOINT_COUNT)

    def is_complete(self):
        """True when every joint is flagged valid and finite"""
        return bool(self.valid.all()) and bool(np.isfinite(self.joints).all())

    def joint(self, joint_id):
        """Position of a single joint"""
        return self.joints[int(joint_id)]

    def __repr__(self):
        return f"SkeletonFrame<t={self.timestamp:.3f}, valid={int(self.valid.sum())}/{JOINT_COUNT}>"


def build_orientation_basis(frame):
    """Rotation whose rows are the body axes x̂, ŷ, ẑ expressed in world coordinates

    The spine axis is taken first and the hip axis is orthogonalized against it.
    """
    for joint_id in ANCHOR_JOINTS:
        if not frame.valid[joint_id] or not np.isfinite(frame.joint(joint_id)).all():
            raise DegenerateFrame(f"anchor joint {joint_id.name} is not valid")

    spine = frame.joint(JointId.Neck) - frame.joint(JointId.Pelvis)
    spine_length = np.linalg.norm(spine)
    if spine_length <= MIN_SPINE_LENGTH:
        raise DegenerateFrame("neck coincides with pelvis")
    z_axis = spine / spine_length

    hips = frame.joint(JointId.RightHip) - frame.joint(JointId.LeftHip)
    hip_length = np.linalg.norm(hips)
    if hip_length <= MIN_SPINE_LENGTH:
        raise DegenerateFrame("left and right hip coincide")
    cos_angle = abs(float(np.dot(hips, z_axis))) / hip_length
    if cos_angle >= math.cos(MIN_HIP_SPINE_ANGLE):
        raise DegenerateFrame("hip axis is within 1 degree of the spine axis")

    x_axis = hips - np.dot(hips, z_axis) * z_axis
    x_axis /= np.linalg.norm(x_axis)
    y_axis = np.cross(z_axis, x_axis)
    return np.stack([x_axis, y_axis, z_axis])


def height_estimate(frames):
    """Median vertical extent (max joint z - min joint z) over the fully valid frames"""
    extents = [
        float(frame.joints[:, 2].max() - frame.joints[:, 2].min())
        for frame in frames
        if frame.is_complete()
    ]
    if not extents:
        raise NoValidFrame("no frame has all joints valid")
    height = float(np.median(extents))
    if height <= 0.0:
        raise NoValidFrame("fully valid frames have no vertical extent")
    return height


def normalize_frame(frame, height):
    """Maps every joint p to R·(p - pelvis)/height, R from build_orientation_basis"""
    if height <= 0.0:
        raise InvalidParams(f"height must be positive, got {height}")
    rotation = build_orientation_basis(frame)
    centered = frame.joints - frame.joint(JointId.Pelvis)
    return centered @ rotation.T / height

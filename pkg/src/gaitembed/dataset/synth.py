"""Deterministic kinematic walker producing synthetic capture tracks

Each subject walks in a straight line at a random heading. Joint angles follow sinusoidal
programs at the subject's step frequency, so subjects differ by cadence, stride, arm swing,
torso lean and limb proportions.
"""
import logging
import math

import numpy as np

from gaitembed.dataset.capture import CaptureTrack
from gaitembed.errors import InvalidParams
from gaitembed.skeleton import JOINT_COUNT, JointId, SkeletonFrame
from utils.common import derive_seeds


log = logging.getLogger(__name__)

FRAME_RATE = 30.0

# Base segment lengths (meters) of a ~1.75 m subject
THIGH = 0.45
SHANK = 0.43
UPPER_ARM = 0.30
FOREARM = 0.27
SPINE = 0.50
HIP_HALF_WIDTH = 0.10
SHOULDER_HALF_WIDTH = 0.19
ANKLE_HEIGHT = 0.08
BASE_HEIGHT = 1.75

# Offsets of the head keypoints from the neck in the upright torso frame
HEAD_OFFSETS = {
    JointId.Nose: (0.0, 0.09, 0.17),
    JointId.LeftEye: (-0.035, 0.07, 0.20),
    JointId.RightEye: (0.035, 0.07, 0.20),
    JointId.LeftEar: (-0.075, 0.0, 0.17),
    JointId.RightEar: (0.075, 0.0, 0.17),
}


class SynthSubjectParams:  # pylint: disable=too-few-public-methods,too-many-instance-attributes
    """Gait program of one synthetic subject

    limb_length_scales multiplies (thigh, shank, upper arm, forearm); noise_sigma is the joint
    noise standard deviation as a fraction of the subject's height.
    """

    def __init__(self, step_frequency=1.0, stride_amplitude=0.4, arm_swing_amplitude=0.3,
                 torso_lean=0.05, limb_length_scales=(1.0, 1.0, 1.0, 1.0), phase_offset=0.0,
                 noise_sigma=0.0):
        self.step_frequency = float(step_frequency)
        self.stride_amplitude = float(stride_amplitude)
        self.arm_swing_amplitude = float(arm_swing_amplitude)
        self.torso_lean = float(torso_lean)
        self.limb_length_scales = tuple(float(scale) for scale in limb_length_scales)
        self.phase_offset = float(phase_offset)
        self.noise_sigma = float(noise_sigma)

    def validate(self):
        """Raises InvalidParams on out-of-range fields"""
        if not 0.5 <= self.step_frequency <= 2.0:
            raise InvalidParams(f"step_frequency {self.step_frequency} outside [0.5, 2.0] Hz")
        if self.stride_amplitude < 0 or self.arm_swing_amplitude < 0:
            raise InvalidParams("amplitudes must be non-negative")
        if self.noise_sigma < 0:
            raise InvalidParams("noise_sigma must be non-negative")
        if len(self.limb_length_scales) != 4 or min(self.limb_length_scales) <= 0:
            raise InvalidParams("limb_length_scales must be 4 positive scalars")
        values = (self.step_frequency, self.stride_amplitude, self.arm_swing_amplitude,
                  self.torso_lean, self.phase_offset, self.noise_sigma) + self.limb_length_scales
        if not all(math.isfinite(value) for value in values):
            raise InvalidParams("parameters must be finite")
        return self

    def to_dict(self):
        """Plain mapping for manifests"""
        return dict(vars(self), limb_length_scales=list(self.limb_length_scales))

    def __repr__(self):
        return (f"SynthSubjectParams<f={self.step_frequency:.2f}Hz, "
                f"stride={self.stride_amplitude:.2f}, arms={self.arm_swing_amplitude:.2f}>")


def random_subject_params(count, seed, noise_sigma=0.005):
    """Draws distinct plausible subjects within the valid parameter ranges"""
    rng = np.random.default_rng(seed)
    subjects = []
    for _ in range(count):
        subjects.append(SynthSubjectParams(
            step_frequency=rng.uniform(0.75, 1.25),
            stride_amplitude=rng.uniform(0.25, 0.55),
            arm_swing_amplitude=rng.uniform(0.1, 0.6),
            torso_lean=rng.uniform(0.0, 0.25),
            limb_length_scales=rng.uniform(0.88, 1.12, size=4),
            phase_offset=rng.uniform(0.0, 2.0 * math.pi),
            noise_sigma=noise_sigma,
        ))
    return subjects


def _lean(vector, angle):
    """Pitches an upper-body vector forward (toward +y) by angle radians"""
    x, y, z = vector
    return np.array([x, y * math.cos(angle) + z * math.sin(angle),
                     -y * math.sin(angle) + z * math.cos(angle)])


def _sagittal(angle):
    """Unit vector hanging down, swung forward by angle radians"""
    return np.array([0.0, math.sin(angle), -math.cos(angle)])


def body_pose(params, t):
    """Joint positions (J, 3) in the walker's own frame: x right, y forward, z up"""
    thigh, shank, upper_arm, forearm = (
        base * scale for base, scale in zip((THIGH, SHANK, UPPER_ARM, FOREARM),
                                            params.limb_length_scales))
    phase = 2.0 * math.pi * params.step_frequency * t + params.phase_offset
    amplitude = params.stride_amplitude
    joints = np.zeros((JOINT_COUNT, 3))

    pelvis_height = 0.96 * (thigh + shank) + ANKLE_HEIGHT
    pelvis = np.array([0.02 * math.sin(phase), 0.0, pelvis_height + 0.015 * math.cos(2.0 * phase)])
    joints[JointId.Pelvis] = pelvis

    legs = ((JointId.LeftHip, JointId.LeftKnee, JointId.LeftAnkle, -1.0, 0.0),
            (JointId.RightHip, JointId.RightKnee, JointId.RightAnkle, 1.0, math.pi))
    for hip_id, knee_id, ankle_id, side, shift in legs:
        leg_phase = phase + shift
        # Flexion reaches further forward than extension goes back
        hip_flexion = amplitude * (1.35 * math.sin(leg_phase) + 0.35)
        knee_flexion = 0.1 + 1.2 * amplitude * max(0.0, math.sin(leg_phase + math.pi / 3.0))
        hip = pelvis + np.array([side * HIP_HALF_WIDTH, 0.0, 0.0])
        knee = hip + thigh * _sagittal(hip_flexion)
        joints[hip_id] = hip
        joints[knee_id] = knee
        joints[ankle_id] = knee + shank * _sagittal(hip_flexion - knee_flexion)

    neck = pelvis + SPINE * _lean((0.0, 0.0, 1.0), params.torso_lean)
    joints[JointId.Neck] = neck
    for joint_id, offset in HEAD_OFFSETS.items():
        joints[joint_id] = neck + _lean(offset, params.torso_lean)

    arms = ((JointId.LeftShoulder, JointId.LeftElbow, JointId.LeftWrist, -1.0, math.pi),
            (JointId.RightShoulder, JointId.RightElbow, JointId.RightWrist, 1.0, 0.0))
    for shoulder_id, elbow_id, wrist_id, side, shift in arms:
        # Arms swing against the leg on the same side
        swing = params.arm_swing_amplitude * math.sin(phase + shift)
        bend = 0.3 + 0.5 * max(0.0, swing)
        shoulder = neck + _lean((side * SHOULDER_HALF_WIDTH, 0.0, -0.05), params.torso_lean)
        elbow = shoulder + upper_arm * _sagittal(swing)
        joints[shoulder_id] = shoulder
        joints[elbow_id] = elbow
        joints[wrist_id] = elbow + forearm * _sagittal(swing + bend)
    return joints


def _yaw_matrix(angle):
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    return np.array([[cos_a, -sin_a, 0.0], [sin_a, cos_a, 0.0], [0.0, 0.0, 1.0]])


def _generate_track(label, params, frame_count, seed):
    rng = np.random.default_rng(seed)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    start = np.append(rng.uniform(-3.0, 3.0, size=2), 0.0)
    rotation = _yaw_matrix(heading)
    forward = rotation @ np.array([0.0, 1.0, 0.0])
    speed = params.step_frequency * (0.6 + params.stride_amplitude)
    noise_scale = params.noise_sigma * BASE_HEIGHT * float(np.mean(params.limb_length_scales))

    frames = []
    for index in range(frame_count):
        t = index / FRAME_RATE
        world = body_pose(params, t) @ rotation.T + start + speed * t * forward
        if noise_scale > 0:
            world = world + rng.normal(0.0, noise_scale, size=world.shape)
        frames.append(SkeletonFrame(t, world))
    return CaptureTrack(label, frames)


def synth_generate(params, duration, seed, labels=None):
    """One 30 Hz capture track per subject, all frames fully valid, deterministic given seed"""
    if duration < 2.0:
        raise InvalidParams(f"duration must be at least 2 s, got {duration}")
    if not params:
        raise InvalidParams("at least one subject is required")
    for subject in params:
        subject.validate()
    if labels is None:
        labels = [f"S{index + 1:02d}" for index in range(len(params))]
    if len(labels) != len(params):
        raise InvalidParams("one label per subject is required")

    frame_count = int(round(duration * FRAME_RATE))
    seeds = derive_seeds(seed, len(params))
    tracks = [
        _generate_track(label, subject, frame_count, subject_seed)
        for label, subject, subject_seed in zip(labels, params, seeds)
    ]
    log.info(f"Generated {len(tracks)} synthetic tracks of {frame_count} frames")
    return tracks

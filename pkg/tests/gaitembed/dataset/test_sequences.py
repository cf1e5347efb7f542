import unittest

import numpy as np

from gaitembed.dataset.capture import CaptureTrack
from gaitembed.dataset.sequences import (
    DatasetSplit,
    FrameSegment,
    GaitSequence,
    build_dataset,
    filter_complete,
    hold_out_labels,
    split_train_val,
    window_segments,
)
from gaitembed.dataset.synth import SynthSubjectParams, body_pose, random_subject_params, synth_generate
from gaitembed.errors import InsufficientData, InvalidParams
from gaitembed.skeleton import JOINT_COUNT, JointId, SkeletonFrame


def walking_frames(count, params=None):
    params = params or SynthSubjectParams()
    return [SkeletonFrame(i / 30, body_pose(params, i / 30)) for i in range(count)]


def dummy_sequences(label, count, start=0):
    return [GaitSequence(np.zeros((JOINT_COUNT, 2, 3)), label, (label, start + i)) for i in range(count)]


class TestFilterComplete(unittest.TestCase):

    def test_invalid_wrist_splits_track(self):
        frames = walking_frames(100)
        valid = np.ones(JOINT_COUNT, dtype=bool)
        valid[JointId.RightWrist] = False
        frames[50] = SkeletonFrame(frames[50].timestamp, frames[50].joints, valid)
        segments = filter_complete(CaptureTrack('A', frames), 3)
        assert [len(segment) for segment in segments] == [50, 49]
        assert [segment.start for segment in segments] == [0, 51]
        assert all(segment.track_id == 3 for segment in segments)

    def test_all_valid_gives_one_segment(self):
        frames = walking_frames(40)
        segments = filter_complete(CaptureTrack('A', frames))
        assert len(segments) == 1
        assert segments[0].frames == frames

    def test_alternating_validity_gives_unit_segments(self):
        frames = walking_frames(20)
        invalid = np.zeros(JOINT_COUNT, dtype=bool)
        for index in range(1, 20, 2):
            frames[index] = SkeletonFrame(frames[index].timestamp, frames[index].joints, invalid)
        segments = filter_complete(CaptureTrack('A', frames))
        assert len(segments) == 10
        assert all(len(segment) == 1 for segment in segments)

    def test_degenerate_frame_breaks_segment(self):
        frames = walking_frames(10)
        joints = frames[4].joints.copy()
        joints[JointId.Neck] = joints[JointId.Pelvis]
        frames[4] = SkeletonFrame(frames[4].timestamp, joints)
        assert [len(segment) for segment in filter_complete(CaptureTrack('A', frames))] == [4, 5]


class TestWindowSegments(unittest.TestCase):

    @staticmethod
    def segment(length):
        return FrameSegment(0, 0, walking_frames(length), 'A')

    def test_length_65_stride_30(self):
        sequences = window_segments([self.segment(65)], 30, 30, 1.75)
        assert [sequence.source_span for sequence in sequences] == [(0, 0), (0, 30)]
        assert sequences[0].tensor.shape == (JOINT_COUNT, 30, 3)

    def test_too_short_segment(self):
        assert window_segments([self.segment(29)], 30, 30, 1.75) == []

    def test_length_90_stride_15(self):
        sequences = window_segments([self.segment(90)], 30, 15, 1.75)
        assert [sequence.source_span[1] for sequence in sequences] == [0, 15, 30, 45, 60]

    def test_windows_are_normalized(self):
        sequence = window_segments([self.segment(30)], 30, 30, 1.75)[0]
        np.testing.assert_array_equal(sequence.tensor[JointId.Pelvis], np.zeros((30, 3)))
        assert sequence.sequence_id == '0:0'
        assert sequence.label == 'A'

    def test_activity_labels(self):
        frames = walking_frames(60)
        segment = FrameSegment(0, 0, frames, 'A', ['walk'] * 30 + ['run'] * 30)
        sequences = window_segments([segment], 30, 30, 1.75, label_field='activity')
        assert [sequence.label for sequence in sequences] == ['walk', 'run']

    def test_invalid_parameters(self):
        with self.assertRaises(InvalidParams):
            window_segments([self.segment(10)], 1, 1, 1.75)
        with self.assertRaises(InvalidParams):
            window_segments([self.segment(10)], 5, 0, 1.75)
        with self.assertRaises(InvalidParams):
            window_segments([self.segment(10)], 5, 5, 1.75, label_field='height')


class TestSplitTrainVal(unittest.TestCase):

    def test_twenty_sequences_ratio_point_nine(self):
        split = split_train_val(dummy_sequences('A', 20), 0.9, 0)
        assert len(split.train) == 18
        assert len(split.validation) == 2

    def test_same_seed_same_split(self):
        sequences = dummy_sequences('A', 20) + dummy_sequences('B', 7)
        first = split_train_val(sequences, 0.9, 5)
        second = split_train_val(sequences, 0.9, 5)
        assert [s.sequence_id for s in first.validation] == [s.sequence_id for s in second.validation]
        assert [s.sequence_id for s in first.train] == [s.sequence_id for s in second.train]

    def test_one_validation_sequence_per_label(self):
        split = split_train_val(dummy_sequences('A', 10) + dummy_sequences('B', 10), 0.9, 1)
        assert sorted(sequence.label for sequence in split.validation) == ['A', 'B']
        assert len(split.train) == 18

    def test_label_with_single_sequence(self):
        with self.assertRaises(InsufficientData) as context:
            split_train_val(dummy_sequences('A', 5) + dummy_sequences('B', 1), 0.9, 0)
        assert context.exception.labels == ['B']

    def test_ratio_out_of_range(self):
        with self.assertRaises(InvalidParams):
            split_train_val(dummy_sequences('A', 5), 1.0, 0)


class TestHoldOutLabels(unittest.TestCase):

    def test_held_labels_removed(self):
        kept, held = hold_out_labels(dummy_sequences('A', 3) + dummy_sequences('B', 2), ['B'])
        assert {sequence.label for sequence in kept} == {'A'}
        assert len(held) == 2

    def test_unknown_label(self):
        with self.assertRaises(InsufficientData):
            hold_out_labels(dummy_sequences('A', 3), ['Z'])


class TestBuildDataset(unittest.TestCase):

    def test_synthetic_subjects(self):
        tracks = synth_generate(random_subject_params(3, 1), 4.0, 2)
        split = build_dataset(tracks, seq_len=10, ratio=0.75, seed=0, holdout=['S03'])
        assert split.labels() == ['S01', 'S02']
        # 120 frames per track -> 12 windows, 3 of them validation
        assert len(split.train) == 18
        assert len(split.validation) == 6
        assert {sequence.label for sequence in split.test} == {'S03'}
        assert len(split.subset('all')) == 36

    def test_zero_stride_rejected(self):
        tracks = synth_generate(random_subject_params(2, 1), 4.0, 2)
        for stride in (0, -5):
            with self.assertRaises(InvalidParams):
                build_dataset(tracks, seq_len=10, stride=stride, ratio=0.75)

    def test_zero_stride_rejected_without_tracks(self):
        with self.assertRaises(InvalidParams):
            build_dataset([], seq_len=10, stride=0)

    def test_default_stride_is_seq_len(self):
        tracks = synth_generate(random_subject_params(2, 1), 4.0, 2)
        implicit = build_dataset(tracks, seq_len=10, ratio=0.75)
        explicit = build_dataset(tracks, seq_len=10, stride=10, ratio=0.75)
        ids = [[sequence.sequence_id for sequence in split.subset('all')] for split in (implicit, explicit)]
        assert ids[0] == ids[1]

    def test_unknown_subset(self):
        with self.assertRaises(InvalidParams):
            DatasetSplit([], []).subset('extra')

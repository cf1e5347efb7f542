"""Turns capture tracks into labelled, normalized (J, T, 3) gait sequences and splits them"""
import logging
import math

import numpy as np

from gaitembed.errors import DegenerateFrame, InsufficientData, InvalidParams, NoValidFrame
from gaitembed.skeleton import build_orientation_basis, height_estimate, normalize_frame
from utils.logging_decorators import log_call


log = logging.getLogger(__name__)

LABEL_FIELDS = ('subject', 'activity')


class FrameSegment:
    """Maximal run of consecutive complete frames cut out of one track"""

    def __init__(self, track_id, start, frames, label, activities=None):
        self.track_id = track_id
        self.start = start
        self.frames = list(frames)
        self.label = label
        self.activities = list(activities) if activities is not None else [None] * len(self.frames)

    def __len__(self):
        return len(self.frames)

    def __repr__(self):
        return f"FrameSegment<track={self.track_id}, start={self.start}, frames={len(self.frames)}>"


class GaitSequence:  # pylint: disable=too-few-public-methods
    """Normalized window of shape (J, T, 3) with its label and origin (track id, start frame)"""

    def __init__(self, tensor, label, source_span):
        self.tensor = tensor
        self.label = label
        self.source_span = tuple(source_span)

    @property
    def sequence_id(self):
        """Stable text id derived from the source span"""
        return f"{self.source_span[0]}:{self.source_span[1]}"

    def __repr__(self):
        return f"GaitSequence<label={self.label}, span={self.source_span}, shape={self.tensor.shape}>"


class DatasetSplit:
    """Training, validation and (optional) held-out test sequences"""

    def __init__(self, train, validation, test=None):
        self.train = list(train)
        self.validation = list(validation)
        self.test = list(test) if test is not None else []

    def subset(self, name):
        """Looks a subset up by name ('train', 'validation', 'test' or 'all')"""
        if name == 'all':
            return self.train + self.validation + self.test
        if name not in ('train', 'validation', 'test'):
            raise InvalidParams(f"unknown subset '{name}'")
        return getattr(self, name)

    def labels(self):
        """Sorted distinct labels of the training sequences"""
        return sorted({sequence.label for sequence in self.train})

    def __repr__(self):
        return (f"DatasetSplit<train={len(self.train)}, validation={len(self.validation)}, "
                f"test={len(self.test)}>")


def _is_degenerate(frame):
    try:
        build_orientation_basis(frame)
    except DegenerateFrame:
        return True
    return False


def filter_complete(track, track_id=0):
    """Cuts a track into maximal runs of complete, orientable frames"""
    segments = []
    run_start = None
    complete = [frame.is_complete() for frame in track.frames]
    degenerate = [ok and _is_degenerate(frame) for frame, ok in zip(track.frames, complete)]
    usable = [ok and not bad for ok, bad in zip(complete, degenerate)] + [False]
    for index, is_usable in enumerate(usable):
        if is_usable and run_start is None:
            run_start = index
        elif not is_usable and run_start is not None:
            segments.append(FrameSegment(
                track_id, run_start, track.frames[run_start:index], track.subject_label,
                track.activities[run_start:index]))
            run_start = None
    discarded = len(track.frames) - sum(len(segment) for segment in segments)
    if any(degenerate):
        log.warning(f"Track {track_id} ({track.subject_label}): "
                    f"rejected {sum(degenerate)} degenerate frames")
    if discarded:
        log.debug(f"Track {track_id} ({track.subject_label}): discarded {discarded} frames")
    return segments


def window_segments(segments, seq_len, stride, height, label_field='subject'):
    """Slices segments into windows of seq_len frames and normalizes each frame

    A segment of length L yields floor((L - seq_len) / stride) + 1 windows, none when L < seq_len.
    """
    if seq_len < 2:
        raise InvalidParams(f"sequence length must be at least 2, got {seq_len}")
    if stride < 1:
        raise InvalidParams(f"stride must be at least 1, got {stride}")
    if height <= 0:
        raise InvalidParams(f"height must be positive, got {height}")
    if label_field not in LABEL_FIELDS:
        raise InvalidParams(f"label field must be one of {LABEL_FIELDS}, got '{label_field}'")

    sequences = []
    for segment in segments:
        if len(segment) < seq_len:
            continue
        normalized = np.stack([normalize_frame(frame, height) for frame in segment.frames])
        for offset in range(0, len(segment) - seq_len + 1, stride):
            window = normalized[offset:offset + seq_len]  # (T, J, 3)
            label = segment.label
            if label_field == 'activity':
                label = segment.activities[offset]
                if label is None:
                    raise InvalidParams(
                        f"track {segment.track_id} frame {segment.start + offset} has no activity")
            sequences.append(GaitSequence(
                np.ascontiguousarray(window.transpose(1, 0, 2)),
                label,
                (segment.track_id, segment.start + offset),
            ))
    return sequences


def hold_out_labels(sequences, labels):
    """Separates the sequences of the given labels (never seen in training) from the rest"""
    held = set(labels)
    kept = [sequence for sequence in sequences if sequence.label not in held]
    removed = [sequence for sequence in sequences if sequence.label in held]
    missing = held - {sequence.label for sequence in removed}
    if missing:
        raise InsufficientData(f"held-out labels not present: {sorted(missing)}", sorted(missing))
    return kept, removed


def _validation_count(count, ratio):
    # Rounding first keeps (1 - 0.9) * 20 from becoming 2.0000000000000004 -> 3
    wanted = math.ceil(round((1.0 - ratio) * count, 9))
    return min(max(wanted, 1), count - 1)


def split_train_val(sequences, ratio, seed):
    """Per-label shuffled split: the first ceil((1 - ratio) * n) sequences go to validation"""
    if not 0.0 < ratio < 1.0:
        raise InvalidParams(f"split ratio must be in (0, 1), got {ratio}")

    by_label = {}
    for sequence in sequences:
        by_label.setdefault(sequence.label, []).append(sequence)
    deficient = sorted(label for label, group in by_label.items() if len(group) < 2)
    if deficient:
        raise InsufficientData(f"labels with fewer than 2 sequences: {deficient}", deficient)

    rng = np.random.default_rng(seed)
    train, validation = [], []
    for label in sorted(by_label):
        group = by_label[label]
        order = rng.permutation(len(group))
        n_validation = _validation_count(len(group), ratio)
        validation.extend(group[i] for i in order[:n_validation])
        train.extend(group[i] for i in order[n_validation:])
    return DatasetSplit(train, validation)


@log_call(log)
def build_dataset(tracks, seq_len=30, stride=None, ratio=0.9, seed=0, holdout=(),
                  label_field='subject'):
    """Full preprocessing chain: filter, estimate height per track, window, hold out, split"""
    stride = seq_len if stride is None else stride
    if stride < 1:
        raise InvalidParams(f"stride must be at least 1, got {stride}")
    sequences = []
    for track_id, track in enumerate(tracks):
        try:
            height = height_estimate(track.frames)
        except NoValidFrame:
            log.warning(f"Skipping track {track_id} ({track.subject_label}): no complete frame")
            continue
        segments = filter_complete(track, track_id)
        sequences.extend(window_segments(segments, seq_len, stride, height, label_field))

    kept, held = hold_out_labels(sequences, holdout) if holdout else (sequences, [])
    split = split_train_val(kept, ratio, seed)
    split.test = held
    log.info(f"Built {split} from {len(tracks)} tracks (T={seq_len}, stride={stride})")
    return split

"""JSON-Lines capture file format: one skeleton observation per line

Record fields: `t` (seconds), `subject` (string), `joints` (19 arrays of 3 numbers, meters,
JointId order; null allowed for an invalid joint), `valid` (19 booleans) and an optional
`activity` string.
"""
import io
import json
import logging
import math
import numbers

import numpy as np

from gaitembed.errors import EmptyInput, ParseError
from gaitembed.skeleton import JOINT_COUNT, SkeletonFrame


log = logging.getLogger(__name__)


class CaptureTrack:
    """All frames recorded for one subject, ordered by timestamp"""

    def __init__(self, subject_label, frames, activities=None):
        self.subject_label = subject_label
        self.frames = list(frames)
        self.activities = list(activities) if activities is not None else [None] * len(self.frames)

    def __len__(self):
        return len(self.frames)

    def __repr__(self):
        return f"CaptureTrack<subject={self.subject_label}, frames={len(self.frames)}>"


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _parse_record(line_number, text):
    """Validates one JSON object and returns (subject, frame, activity)"""
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(line_number, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(record, dict):
        raise ParseError(line_number, "record is not a JSON object")

    timestamp = record.get('t')
    if not _is_number(timestamp) or not math.isfinite(timestamp) or timestamp < 0:
        raise ParseError(line_number, "'t' must be a non-negative number")
    subject = record.get('subject')
    if not isinstance(subject, str) or not subject:
        raise ParseError(line_number, "'subject' must be a non-empty string")
    activity = record.get('activity')
    if activity is not None and not isinstance(activity, str):
        raise ParseError(line_number, "'activity' must be a string")

    joints = record.get('joints')
    if not isinstance(joints, list) or len(joints) != JOINT_COUNT:
        count = len(joints) if isinstance(joints, list) else 'no'
        raise ParseError(line_number, f"expected {JOINT_COUNT} joints, found {count}")
    valid = record.get('valid')
    if not isinstance(valid, list) or len(valid) != JOINT_COUNT \
            or not all(isinstance(flag, bool) for flag in valid):
        raise ParseError(line_number, f"'valid' must hold {JOINT_COUNT} booleans")

    positions = np.full((JOINT_COUNT, 3), np.nan)
    for index, joint in enumerate(joints):
        if joint is None and not valid[index]:
            continue
        if not isinstance(joint, list) or len(joint) != 3 or not all(_is_number(c) for c in joint):
            raise ParseError(line_number, f"joint {index} must be an array of 3 numbers")
        positions[index] = joint
        if valid[index] and not np.isfinite(positions[index]).all():
            raise ParseError(line_number, f"joint {index} is flagged valid but not finite")
    return subject, SkeletonFrame(timestamp, positions, valid), activity


def _iter_lines(stream):
    """Yields (line number, text) from a text or binary stream"""
    for line_number, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode('utf-8')
            except UnicodeDecodeError as exc:
                raise ParseError(line_number, "line is not valid UTF-8") from exc
        yield line_number, line


def parse_capture_file(stream):
    """Parses a JSON-Lines capture stream into one CaptureTrack per subject

    Tracks come back in order of the first appearance of each subject; the frames of a track are
    sorted by timestamp.
    """
    grouped = {}
    for line_number, line in _iter_lines(stream):
        if not line.strip():
            continue
        subject, frame, activity = _parse_record(line_number, line)
        grouped.setdefault(subject, []).append((frame.timestamp, line_number, frame, activity))

    if not grouped:
        raise EmptyInput("capture input holds no records")

    tracks = []
    for subject, records in grouped.items():
        records.sort(key=lambda record: record[0])  # stable: ties keep file order
        for previous, current in zip(records, records[1:]):
            if current[0] <= previous[0]:
                raise ParseError(
                    current[1], f"duplicate timestamp {current[0]} for subject '{subject}'")
        tracks.append(CaptureTrack(
            subject,
            [record[2] for record in records],
            [record[3] for record in records],
        ))
    log.debug(f"Parsed {len(tracks)} tracks ({sum(len(t) for t in tracks)} frames)")
    return tracks


def read_capture_file(path):
    """Opens and parses a capture file from disk"""
    with open(path, 'rb') as stream:
        return parse_capture_file(stream)


def _frame_record(subject, frame, activity):
    joints = [
        [float(c) for c in position] if np.isfinite(position).all() else None
        for position in frame.joints
    ]
    record = {
        't': frame.timestamp,
        'subject': subject,
        'joints': joints,
        'valid': [bool(flag) for flag in frame.valid],
    }
    if activity is not None:
        record['activity'] = activity
    return record


def serialize_capture(tracks, stream):
    """Writes tracks to a text stream in the JSON-Lines capture format

    Floats are written with Python's shortest round-trip repr, so parsing the output gives back
    bit-identical coordinates.
    """
    for track in tracks:
        for frame, activity in zip(track.frames, track.activities):
            record = _frame_record(track.subject_label, frame, activity)
            stream.write(json.dumps(record, separators=(',', ':'), allow_nan=False))
            stream.write('\n')


def write_capture_file(tracks, path):
    """Serializes tracks to a UTF-8 capture file on disk"""
    with io.open(path, 'w', encoding='utf-8', newline='\n') as stream:
        serialize_capture(tracks, stream)

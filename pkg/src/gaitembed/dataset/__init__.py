"""Capture ingestion, windowing into gait sequences, splitting and synthetic data"""
from gaitembed.dataset.capture import (
    CaptureTrack,
    parse_capture_file,
    read_capture_file,
    serialize_capture,
    write_capture_file,
)
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
from gaitembed.dataset.synth import SynthSubjectParams, random_subject_params, synth_generate

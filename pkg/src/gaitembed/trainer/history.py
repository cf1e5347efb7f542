"""Per-epoch training records and their CSV exports"""
import collections
import csv

from gaitembed.errors import ArtifactWriteError
from utils.common import format_float


EpochRecord = collections.namedtuple(
    'EpochRecord',
    ['epoch', 'mean_loss', 'triplets', 'steps', 'skipped_steps', 'validation_ari', 'wall_time'])

HISTORY_COLUMNS = ['epoch', 'mean_loss', 'triplets', 'steps', 'skipped_steps', 'validation_ari']
TIMING_COLUMNS = ['epoch', 'wall_time_s']


class TrainHistory:
    """One EpochRecord per completed epoch, plus the loss of every executed step"""

    def __init__(self):
        self.records = []
        self.step_losses = []

    def append(self, record):
        """Adds the record of a completed epoch"""
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def last_validation_ari(self):
        """Most recent validation ARI, or None when validation never ran"""
        for record in reversed(self.records):
            if record.validation_ari is not None:
                return record.validation_ari
        return None

    def __repr__(self):
        return f"TrainHistory<epochs={len(self.records)}, steps={len(self.step_losses)}>"


def _write_rows(path, columns, rows):
    try:
        with open(path, 'w', newline='', encoding='utf-8') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(columns)
            writer.writerows(rows)
    except OSError as error:
        raise ArtifactWriteError(f"cannot write '{path}': {error}") from error


def write_history_csv(history, path):
    """Deterministic per-epoch metrics; wall time is left out so reruns are byte-identical"""
    _write_rows(path, HISTORY_COLUMNS, [
        [record.epoch, format_float(record.mean_loss), record.triplets, record.steps,
         record.skipped_steps, format_float(record.validation_ari)]
        for record in history
    ])


def write_timings_csv(history, path):
    """Wall time per epoch"""
    _write_rows(path, TIMING_COLUMNS, [
        [record.epoch, f'{record.wall_time:.3f}'] for record in history
    ])

"""Adjusted Rand Index from the pair-counting contingency table"""
import numpy as np

from gaitembed.errors import InvalidParams, LengthMismatch


def _pairs(counts):
    counts = np.asarray(counts, dtype=np.int64)
    return int(np.sum(counts * (counts - 1) // 2))


def contingency_table(labels_true, labels_pred):
    """(classes, clusters) co-occurrence counts; labels are compared by their text form"""
    _, true_index = np.unique([str(label) for label in labels_true], return_inverse=True)
    _, pred_index = np.unique([str(label) for label in labels_pred], return_inverse=True)
    table = np.zeros((true_index.max() + 1, pred_index.max() + 1), dtype=np.int64)
    np.add.at(table, (true_index, pred_index), 1)
    return table


def ari(labels_true, labels_pred):
    """(Index - Expected) / (Max - Expected); 1.0 when Max equals Expected

    Symmetric in its arguments and invariant under relabeling of either one.
    """
    labels_true = list(labels_true)
    labels_pred = list(labels_pred)
    if len(labels_true) != len(labels_pred):
        raise LengthMismatch(f"{len(labels_true)} true labels vs {len(labels_pred)} predicted labels")
    if len(labels_true) < 2:
        raise InvalidParams("the adjusted Rand index needs at least two labelled points")

    table = contingency_table(labels_true, labels_pred)
    index = _pairs(table)
    row_pairs = _pairs(table.sum(axis=1))
    column_pairs = _pairs(table.sum(axis=0))
    total_pairs = _pairs([len(labels_true)])

    expected = row_pairs * column_pairs / total_pairs
    maximum = (row_pairs + column_pairs) / 2
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))

"""K-means clustering scored against ground-truth labels"""
import logging

import numpy as np

from gaitembed.analysis.ari import ari
from gaitembed.analysis.kmeans import kmeans
from gaitembed.errors import EmptyInput


log = logging.getLogger(__name__)


def cluster_and_score(matrix, labels, k=None, seed=0):
    """K-means on the rows of matrix and its ARI against labels; returns (assignment, ari)

    k defaults to the number of distinct labels.
    """
    labels = list(labels)
    k = k if k is not None else len(set(labels))
    assignment = kmeans(matrix, k, seed)
    score = ari(labels, assignment.labels)
    log.debug(f"k={k}: {assignment}, ARI={score:.6f}")
    return assignment, score


def raw_baseline_ari(sequences, k=None, seed=0):
    """ARI of K-means on the flattened normalized (J, T, 3) tensors, without any embedding"""
    if not sequences:
        raise EmptyInput("no sequences to cluster")
    matrix = np.stack([sequence.tensor.reshape(-1) for sequence in sequences]).astype(np.float64)
    _, score = cluster_and_score(matrix, [sequence.label for sequence in sequences], k, seed)
    log.info(f"Raw-data baseline ARI over {len(sequences)} sequences: {score:.4f}")
    return score

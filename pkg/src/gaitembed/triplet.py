"""Pairwise distances, online triplet mining and the hinged triplet loss

Mining runs on detached distances; the loss node recomputes the distances of the mined triplets
from the embedding tensor so gradients flow back to the network.
"""
import collections
import logging
from enum import Enum

import numpy as np

from gaitembed.errors import DegenerateBatch, InvalidParams, NoTriplets


log = logging.getLogger(__name__)

DISTANCE_EPS = 1e-12

Triplet = collections.namedtuple('Triplet', ['anchor', 'positive', 'negative'])


class MiningKind(Enum):
    """Negative selection rule"""
    Random = 'random'
    SemiHard = 'semi-hard'
    Hard = 'hard'

    @classmethod
    def parse(cls, value):
        """Accepts 'semi-hard', 'semi_hard', 'SemiHard' and friends"""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace('_', '-')
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise InvalidParams(f"unknown mining strategy '{value}'")


class MiningStrategy:  # pylint: disable=too-few-public-methods
    """Mining rule plus margin; sample_one keeps a single random semi-hard negative per pair"""

    def __init__(self, kind=MiningKind.SemiHard, margin=0.2, sample_one=False):
        self.kind = MiningKind.parse(kind)
        self.margin = float(margin)
        self.sample_one = bool(sample_one)
        if not self.margin > 0:
            raise InvalidParams(f"margin must be positive, got {margin}")

    def __repr__(self):
        return f"MiningStrategy<{self.kind.value}, margin={self.margin}, sample_one={self.sample_one}>"


def pairwise_distances(embeddings):
    """(N, N) Euclidean distances between rows; exactly symmetric with a zero diagonal"""
    embeddings = np.asarray(embeddings, dtype=np.float64)
    differences = embeddings[:, np.newaxis, :] - embeddings[np.newaxis, :, :]
    distances = np.sqrt(np.sum(differences * differences, axis=-1))
    np.fill_diagonal(distances, 0.0)
    return distances


def triplet_loss_value(d_ap, d_an, margin):
    """max(0, d_ap - d_an + margin)"""
    return max(0.0, d_ap - d_an + margin)


def _check_batch(labels):
    counts = collections.Counter(labels)
    if len(counts) < 2:
        raise DegenerateBatch("batch needs at least two distinct labels")
    if max(counts.values()) < 2:
        raise DegenerateBatch("batch needs at least one label occurring twice")


def mine_triplets(dist, labels, strategy, rng=None):
    """Triplets for every ordered (anchor, positive) pair, in anchor then positive order

    semi-hard: all negatives with d_ap < d_an < d_ap + margin (one of them at random when
    strategy.sample_one); hard: the closest negative, lowest index on ties; random: one
    uniformly drawn negative. Pairs without a qualifying negative contribute nothing.
    """
    labels = list(labels)
    _check_batch(labels)
    if rng is None and (strategy.kind is MiningKind.Random or strategy.sample_one):
        raise InvalidParams("random selection needs an rng")
    label_array = np.array([str(label) for label in labels], dtype=object)
    dist = np.asarray(dist)

    triplets = []
    for anchor, label in enumerate(labels):
        negatives = np.flatnonzero(label_array != str(label))
        if negatives.size == 0:
            continue
        for positive in np.flatnonzero(label_array == str(label)):
            if positive == anchor:
                continue
            d_ap = dist[anchor, positive]
            d_an = dist[anchor, negatives]
            if strategy.kind is MiningKind.SemiHard:
                chosen = negatives[(d_an > d_ap) & (d_an < d_ap + strategy.margin)]
                if strategy.sample_one and chosen.size:
                    chosen = chosen[[rng.integers(chosen.size)]]
            elif strategy.kind is MiningKind.Hard:
                chosen = negatives[[int(np.argmin(d_an))]]  # argmin keeps the lowest index
            else:
                chosen = negatives[[rng.integers(negatives.size)]]
            triplets.extend(Triplet(anchor, int(positive), int(negative)) for negative in chosen)
    log.debug(f"Mined {len(triplets)} {strategy.kind.value} triplets from {len(labels)} embeddings")
    return triplets


def _unit_differences(embeddings, first, second):
    differences = embeddings[first] - embeddings[second]
    distances = np.sqrt(np.sum(differences * differences, axis=1))
    return differences / np.maximum(distances, DISTANCE_EPS)[:, np.newaxis], distances


def triplet_loss_node(embeddings, triplets, margin):
    """Autodiff node: mean over triplets of max(0, d_ap - d_an + margin)"""
    anchors = np.array([t.anchor for t in triplets], dtype=np.intp)
    positives = np.array([t.positive for t in triplets], dtype=np.intp)
    negatives = np.array([t.negative for t in triplets], dtype=np.intp)

    def forward(value):
        # Double precision keeps the loss consistent with the distances used for mining
        value = value.astype(np.float64)
        direction_ap, d_ap = _unit_differences(value, anchors, positives)
        direction_an, d_an = _unit_differences(value, anchors, negatives)
        losses = d_ap - d_an + margin
        active = losses > 0
        loss = np.asarray(np.where(active, losses, 0.0).mean())
        return loss, (direction_ap, direction_an, active, value.shape)

    def backward(grad, cache):
        direction_ap, direction_an, active, shape = cache
        weight = (float(grad) / len(anchors)) * active[:, np.newaxis]
        result = np.zeros(shape, dtype=grad.dtype)
        np.add.at(result, anchors, weight * (direction_ap - direction_an))
        np.add.at(result, positives, -weight * direction_ap)
        np.add.at(result, negatives, weight * direction_an)
        return (result,)

    return embeddings.graph.apply('triplet_loss', (embeddings,), forward, backward,
                                  kinks=lambda cache: cache[2])


def batch_triplet_loss(embeddings, labels, strategy, rng=None):
    """Mines on the current embedding values and returns (scalar loss tensor, triplets)"""
    triplets = mine_triplets(pairwise_distances(embeddings.data), labels, strategy, rng)
    if not triplets:
        raise NoTriplets("no triplet satisfies the mining rule in this batch")
    return triplet_loss_node(embeddings, triplets, strategy.margin), triplets

"""Exact t-SNE projection to two dimensions

Per-point Gaussian bandwidths are bisected until each conditional distribution reaches the
target perplexity, the joint affinities are the symmetrized conditionals, and the 2D layout
minimizes KL(P || Q) with a Student-t kernel by gradient descent with momentum, adaptive gains
and early exaggeration.
"""
import logging

import numpy as np

from gaitembed.errors import InvalidParams, TooFewPoints


log = logging.getLogger(__name__)

PERPLEXITY_TOL = 1e-3
MAX_BISECTION_STEPS = 200
EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
MIN_GAIN = 0.01
AFFINITY_FLOOR = 1e-12


class Projection2D:  # pylint: disable=too-few-public-methods
    """(N, 2) layout with a label and sequence id per point"""

    def __init__(self, points, labels, sequence_ids=None, kl_divergence=None):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        self.labels = [str(label) for label in labels]
        self.sequence_ids = list(sequence_ids) if sequence_ids is not None else \
            [str(index) for index in range(len(self.labels))]
        self.kl_divergence = kl_divergence

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"Projection2D<points={len(self)}, kl={self.kl_divergence}>"


def squared_distances(points):
    """(N, N) squared Euclidean distances with an exactly zero diagonal"""
    points = np.asarray(points, dtype=np.float64)
    differences = points[:, np.newaxis, :] - points[np.newaxis, :, :]
    distances = np.sum(differences * differences, axis=-1)
    np.fill_diagonal(distances, 0.0)
    return distances


def _row_distribution(distances, beta):
    """Gaussian conditional over neighbors and its entropy in nats"""
    shifted = distances - distances.min()
    weights = np.exp(-beta * shifted)
    total = weights.sum()
    probabilities = weights / total
    entropy = np.log(total) + beta * np.sum(shifted * probabilities)
    return probabilities, entropy


def conditional_perplexity(distances, beta):
    """Perplexity exp(H) of the conditional distribution over a row's neighbor distances"""
    _, entropy = _row_distribution(np.asarray(distances, dtype=np.float64), beta)
    return float(np.exp(entropy))


def conditional_affinities(sq_distances, perplexity):
    """Row-stochastic p_{j|i} (zero diagonal) and the precision beta = 1 / (2 sigma^2) per row"""
    count = len(sq_distances)
    if count < 2:
        raise TooFewPoints("affinities need at least two points")
    if perplexity <= 0:
        raise InvalidParams(f"perplexity must be positive, got {perplexity}")
    target = np.log(perplexity)
    conditionals = np.zeros((count, count))
    betas = np.ones(count)
    for row in range(count):
        neighbors = np.concatenate([np.arange(row), np.arange(row + 1, count)])
        distances = sq_distances[row, neighbors]
        beta, lower, upper = 1.0, 0.0, np.inf
        probabilities, entropy = _row_distribution(distances, beta)
        for _ in range(MAX_BISECTION_STEPS):
            if abs(np.exp(entropy) - perplexity) < PERPLEXITY_TOL:
                break
            if entropy > target:
                lower = beta
                beta = beta * 2.0 if upper == np.inf else (beta + upper) / 2.0
            else:
                upper = beta
                beta = (beta + lower) / 2.0
            probabilities, entropy = _row_distribution(distances, beta)
        else:
            log.debug(f"Row {row}: perplexity {np.exp(entropy):.6g} did not reach {perplexity}")
        conditionals[row, neighbors] = probabilities
        betas[row] = beta
    return conditionals, betas


def joint_affinities(conditionals):
    """Symmetric joint distribution (p_{j|i} + p_{i|j}) / 2N, normalized to sum to 1"""
    joint = (conditionals + conditionals.T) / (2.0 * len(conditionals))
    return joint / joint.sum()


def _student_t(points):
    numerators = 1.0 / (1.0 + squared_distances(points))
    np.fill_diagonal(numerators, 0.0)
    return numerators, numerators / numerators.sum()


def kl_divergence(joint, low_dim):
    """KL(P || Q) over off-diagonal pairs"""
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log(joint[mask] / np.maximum(low_dim[mask], AFFINITY_FLOOR))))


def tsne(embeddings, labels=None, perplexity=30.0, seed=0, iters=1000, learning_rate=200.0,
         sequence_ids=None):
    """Projects the rows of embeddings to 2D; deterministic given seed

    perplexity is capped at (N - 1) / 3.
    """
    points = np.asarray(embeddings, dtype=np.float64)
    count = len(points)
    if count < 4:
        raise TooFewPoints(f"t-SNE needs at least 4 points, got {count}")
    labels = labels if labels is not None else [''] * count
    perplexity = min(float(perplexity), (count - 1) / 3.0)

    conditionals, _ = conditional_affinities(squared_distances(points), perplexity)
    joint = np.maximum(joint_affinities(conditionals), AFFINITY_FLOOR)
    np.fill_diagonal(joint, 0.0)

    rng = np.random.default_rng(seed)
    layout = rng.normal(0.0, 1e-4, size=(count, 2))
    velocity = np.zeros_like(layout)
    gains = np.ones_like(layout)
    for iteration in range(iters):
        exaggerated = iteration < EXAGGERATION_ITERS
        target = joint * EXAGGERATION if exaggerated else joint
        momentum = INITIAL_MOMENTUM if exaggerated else FINAL_MOMENTUM

        numerators, low_dim = _student_t(layout)
        weights = (target - np.maximum(low_dim, AFFINITY_FLOOR)) * numerators
        gradient = 4.0 * (weights.sum(axis=1)[:, np.newaxis] * layout - weights @ layout)

        same_sign = (gradient > 0) == (velocity > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, MIN_GAIN)
        velocity = momentum * velocity - learning_rate * gains * gradient
        layout = layout + velocity
        layout = layout - layout.mean(axis=0)

        if (iteration + 1) % 250 == 0:
            log.debug(f"t-SNE iteration {iteration + 1}: KL={kl_divergence(joint, low_dim):.6f}")

    _, low_dim = _student_t(layout)
    divergence = kl_divergence(joint, low_dim)
    log.info(f"t-SNE projected {count} points, perplexity {perplexity:.4g}, KL={divergence:.6f}")
    return Projection2D(layout, labels, sequence_ids, divergence)

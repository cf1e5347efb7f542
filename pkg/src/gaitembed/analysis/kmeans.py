"""K-means with k-means++ seeding and Lloyd iterations"""
import logging

import numpy as np

from gaitembed.errors import InvalidK, InvalidParams


log = logging.getLogger(__name__)


class ClusterAssignment:  # pylint: disable=too-few-public-methods
    """Cluster index per point, the (k, D) centroids and the within-cluster sum of squares"""

    def __init__(self, labels, centroids, inertia, iterations=0):
        self.labels = labels
        self.centroids = centroids
        self.inertia = float(inertia)
        self.iterations = iterations

    @property
    def k(self):
        """Number of clusters"""
        return len(self.centroids)

    def __repr__(self):
        return f"ClusterAssignment<k={self.k}, inertia={self.inertia:.6g}, iterations={self.iterations}>"


def squared_distances(points, centroids):
    """(N, k) squared Euclidean distances"""
    differences = points[:, np.newaxis, :] - centroids[np.newaxis, :, :]
    return np.sum(differences * differences, axis=-1)


def kmeans_plusplus(points, k, rng):
    """Seeds k centroids: the first uniformly, each next one with probability proportional to D^2"""
    count = len(points)
    chosen = [int(rng.integers(count))]
    closest = squared_distances(points, points[chosen]).min(axis=1)
    while len(chosen) < k:
        total = closest.sum()
        if total > 0:
            index = int(rng.choice(count, p=closest / total))
        else:
            # All remaining points coincide with a centroid
            remaining = np.setdiff1d(np.arange(count), chosen)
            index = int(rng.choice(remaining))
        chosen.append(index)
        closest = np.minimum(closest, squared_distances(points, points[[index]])[:, 0])
    return points[chosen].copy()


def _assign(points, centroids):
    distances = squared_distances(points, centroids)
    labels = np.argmin(distances, axis=1)
    return labels, float(distances[np.arange(len(points)), labels].sum()), distances


def _update(points, labels, distances, centroids):
    """Cluster means; empty clusters move to the point farthest from its current centroid"""
    updated = centroids.copy()
    point_costs = distances[np.arange(len(points)), labels].copy()
    for cluster in range(len(centroids)):
        members = labels == cluster
        if members.any():
            updated[cluster] = points[members].mean(axis=0)
    for cluster in range(len(centroids)):
        if not (labels == cluster).any():
            farthest = int(np.argmax(point_costs))
            log.debug(f"Re-seeding empty cluster {cluster} at point {farthest}")
            updated[cluster] = points[farthest]
            point_costs[farthest] = -1.0
    return updated


def kmeans(embeddings, k, seed, max_iter=300, tol=1e-6, callback=None):
    """Clusters the rows of embeddings into k groups; deterministic given seed

    Stops once no centroid moves more than tol or after max_iter iterations. callback, when
    given, is called as callback(iteration, inertia) after every assignment step; the inertia
    sequence is non-increasing.
    """
    points = np.asarray(embeddings, dtype=np.float64)
    if points.ndim != 2 or len(points) == 0:
        raise InvalidParams(f"expected a non-empty (N, D) matrix, got shape {points.shape}")
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= len(points):
        raise InvalidK(f"k must be an integer in 1..{len(points)}, got {k}")
    k = int(k)

    centroids = kmeans_plusplus(points, k, np.random.default_rng(seed))
    iteration = 0
    for iteration in range(1, max_iter + 1):
        labels, inertia, distances = _assign(points, centroids)
        if callback is not None:
            callback(iteration, inertia)
        updated = _update(points, labels, distances, centroids)
        shift = float(np.sqrt(np.max(np.sum((updated - centroids) ** 2, axis=1))))
        centroids = updated
        if shift < tol:
            break

    labels, inertia, _ = _assign(points, centroids)
    if callback is not None:
        callback(iteration + 1, inertia)
    log.debug(f"k-means converged after {iteration} iterations, inertia {inertia:.6g}")
    return ClusterAssignment(labels, centroids, inertia, iteration)

# -*- coding: utf-8 -*-
#
# Copyright 2022-2024 ETH Zurich
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""K-means clustering: k-means++ seeding followed by Lloyd iterations."""

from __future__ import annotations
from dataclasses import dataclass
import logging
import numpy as np
from typing import TYPE_CHECKING, List, Tuple

from word_recognition.framework.errors import TooFewPoints
from word_recognition.framework.seeding import make_rng

if TYPE_CHECKING:
    from word_recognition.utils.typingx import ArrayLike, FloatArray, IntArray, SeedLike


log = logging.getLogger(__name__)

MAX_ITERATIONS: int = 300


@dataclass(frozen=True, eq=False)
class KMeansResult:
    centroids: FloatArray
    assignments: IntArray
    inertia: float
    n_iter: int
    inertia_history: Tuple[float, ...]

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def squared_distances(points: FloatArray, centroids: FloatArray) -> FloatArray:
    """Matrix of squared Euclidean distances, points along rows and centroids along columns."""
    diff = points[:, np.newaxis, :] - centroids[np.newaxis, :, :]
    return np.sum(diff * diff, axis=2)


def kmeans_plusplus(points: FloatArray, k: int, rng: np.random.Generator) -> FloatArray:
    """Pick ``k`` initial centroids among ``points`` by D^2 sampling."""
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    closest = squared_distances(points, points[chosen])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            index = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a chosen centroid
            index = int(rng.choice(np.setdiff1d(np.arange(n), chosen)))
        chosen.append(index)
        closest = np.minimum(closest, squared_distances(points, points[[index]])[:, 0])
    return points[chosen].copy()


def _assign(distances: FloatArray, current: IntArray) -> IntArray:
    """Nearest centroid per point; a point stays put when its current centroid ties the best."""
    rows = np.arange(distances.shape[0])
    best = np.argmin(distances, axis=1)
    return np.where(distances[rows, current] <= distances[rows, best], current, best)


def _repair_empty_clusters(
    points: FloatArray, labels: IntArray, centroids: FloatArray
) -> Tuple[IntArray, FloatArray]:
    """Move the point farthest from its centroid into each empty cluster."""
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    if np.all(counts > 0):
        return labels, centroids
    labels = labels.copy()
    centroids = centroids.copy()
    for cluster in np.flatnonzero(counts == 0):
        dist = np.sum((points - centroids[labels]) ** 2, axis=1)
        candidates = np.where(counts[labels] > 1, dist, -np.inf)
        index = int(np.argmax(candidates))
        counts[labels[index]] -= 1
        labels[index] = cluster
        counts[cluster] = 1
        centroids[cluster] = points[index]
    return labels, centroids


def _cluster_means(points: FloatArray, labels: IntArray, k: int) -> FloatArray:
    return np.stack([points[labels == cluster].mean(axis=0) for cluster in range(k)])


def lloyd(
    points: FloatArray, initial_centroids: FloatArray, max_iter: int = MAX_ITERATIONS
) -> KMeansResult:
    """
    Lloyd iterations until the assignments stop changing or ``max_iter`` updates were done.

    The inertia recorded after each centroid update never increases.
    """
    k = initial_centroids.shape[0]
    rows = np.arange(points.shape[0])
    labels = np.argmin(squared_distances(points, initial_centroids), axis=1)
    centroids = initial_centroids
    history: List[float] = []
    for it in range(1, max_iter + 1):
        labels, centroids = _repair_empty_clusters(points, labels, centroids)
        centroids = _cluster_means(points, labels, k)
        distances = squared_distances(points, centroids)
        history.append(float(distances[rows, labels].sum()))
        new_labels = _assign(distances, labels)
        if np.array_equal(new_labels, labels) or it == max_iter:
            break
        labels = new_labels
    return KMeansResult(
        centroids=centroids,
        assignments=labels,
        inertia=history[-1],
        n_iter=len(history),
        inertia_history=tuple(history),
    )


def kmeans(
    points: ArrayLike,
    k: int,
    seed: SeedLike = 0,
    *,
    restarts: int = 10,
    max_iter: int = MAX_ITERATIONS,
) -> KMeansResult:
    """
    Cluster the rows of ``points`` into ``k`` groups.

    Each of the ``restarts`` runs draws its k-means++ seeding from a stream derived from
    ``seed`` and the run index; the run with the lowest inertia is kept (the earliest on ties).
    A one-dimensional input is read as one scalar point per entry.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, np.newaxis]
    if x.ndim != 2:
        raise ValueError(f"Expected an N x C matrix of points, got shape {x.shape}.")
    if k < 1:
        raise ValueError(f"The number of clusters must be positive, got {k}.")
    if x.shape[0] < k:
        raise TooFewPoints(f"Cannot form {k} clusters out of {x.shape[0]} points.")
    if not np.all(np.isfinite(x)):
        raise ValueError("Points contain non-finite values.")
    if restarts < 1:
        raise ValueError(f"At least one run is required, got {restarts}.")

    best = None
    for run in range(restarts):
        result = lloyd(x, kmeans_plusplus(x, k, make_rng(seed, run)), max_iter)
        log.debug(
            "k-means run %d: inertia %.6g after %d iterations", run, result.inertia, result.n_iter
        )
        if best is None or result.inertia < best.inertia:
            best = result
    assert best is not None
    return best

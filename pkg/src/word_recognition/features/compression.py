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

"""Fixed-length utterance descriptors built by clustering the frame-level MFCCs."""

from __future__ import annotations
from dataclasses import dataclass, replace
import numpy as np
from typing import TYPE_CHECKING

from word_recognition.audio.preprocessing import preprocess
from word_recognition.features.kmeans import kmeans
from word_recognition.features.mfcc import mfcc

if TYPE_CHECKING:
    from word_recognition.audio.wav import Signal
    from word_recognition.features.kmeans import KMeansResult
    from word_recognition.features.mfcc import MfccMatrix
    from word_recognition.framework.config import FeatureConfig
    from word_recognition.utils.typingx import FloatArray, SeedLike


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """``k`` centroids of ``coeff_count`` cepstral coefficients, flattened row by row."""

    values: FloatArray
    k: int
    coeff_count: int

    def __post_init__(self) -> None:
        if self.values.shape != (self.k * self.coeff_count,):
            raise ValueError(
                f"Expected {self.k} x {self.coeff_count} = {self.k * self.coeff_count} values, "
                f"got shape {self.values.shape}."
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Feature vector contains non-finite values.")

    def __len__(self) -> int:
        return self.values.size

    def as_matrix(self) -> FloatArray:
        return self.values.reshape(self.k, self.coeff_count)


def order_clusters_by_time(result: KMeansResult) -> KMeansResult:
    """Relabel clusters by ascending mean index of their assigned frames."""
    mean_index = np.array(
        [np.flatnonzero(result.assignments == cluster).mean() for cluster in range(result.k)]
    )
    order = np.argsort(mean_index, kind="stable")
    relabel = np.empty_like(order)
    relabel[order] = np.arange(result.k)
    return replace(
        result, centroids=result.centroids[order], assignments=relabel[result.assignments]
    )


def compress_features(
    m: MfccMatrix, k: int = 8, seed: SeedLike = 0, restarts: int = 10
) -> FeatureVector:
    """Cluster the frames of ``m`` into ``k`` centroids and flatten them in temporal order."""
    result = order_clusters_by_time(kmeans(m.coeffs, k, seed, restarts=restarts))
    return FeatureVector(result.centroids.reshape(-1).copy(), k, m.coeff_count)


def extract_features(s: Signal, config: FeatureConfig, seed: SeedLike = 0) -> FeatureVector:
    """Run the whole chain on a raw recording: preprocessing, MFCC, k-means compression."""
    coeffs = mfcc(preprocess(s, config), config)
    return compress_features(coeffs, config.kmeans_k, seed, config.kmeans_restarts)

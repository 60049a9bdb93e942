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

from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import numpy as np
from typing import TYPE_CHECKING, Callable, List, Optional, Tuple

from word_recognition.audio.wav import read_wav
from word_recognition.corpus.featureset import FeatureSet
from word_recognition.features.compression import extract_features
from word_recognition.framework.errors import StrictModeFailure, WordRecognitionError
from word_recognition.framework.seeding import derive_seed

if TYPE_CHECKING:
    from word_recognition.corpus.manifest import Manifest, ManifestEntry
    from word_recognition.features.compression import FeatureVector
    from word_recognition.framework.config import FeatureConfig
    from word_recognition.utils.typingx import SeedLike

    Extractor = Callable[[ManifestEntry, FeatureConfig, np.random.SeedSequence], FeatureVector]


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeaturizeFailure:
    entry_index: int
    path: str
    error: str
    message: str


@dataclass(frozen=True, eq=False)
class FeaturizeResult:
    features: FeatureSet
    failures: Tuple[FeaturizeFailure, ...]


def extract_entry(
    entry: ManifestEntry, config: FeatureConfig, seed: np.random.SeedSequence
) -> FeatureVector:
    return extract_features(read_wav(entry.path), config, seed)


def featurize_corpus(
    m: Manifest,
    config: FeatureConfig,
    seed: SeedLike = 0,
    *,
    strict: bool = False,
    num_workers: int = 1,
    extractor: Optional[Extractor] = None,
) -> FeaturizeResult:
    """
    Turn every manifest entry into a feature vector.

    Entry ``i`` clusters with the seed derived from ``(seed, i)``, so the result does not depend
    on ``num_workers`` nor on the order the entries are processed in. Rows keep the manifest
    order. Failing entries are reported and left out, or abort the run when ``strict`` is set.
    """
    extract = extractor or extract_entry

    def job(index: int) -> Tuple[Optional[FeatureVector], Optional[FeaturizeFailure]]:
        entry = m.entries[index]
        try:
            return extract(entry, config, derive_seed(seed, index)), None
        except (WordRecognitionError, OSError) as err:
            return None, FeaturizeFailure(index, entry.path, type(err).__name__, str(err))

    if num_workers > 1:
        with ThreadPoolExecutor(max_workers=num_workers) as executor:
            outcomes = list(executor.map(job, range(len(m))))
    else:
        outcomes = [job(index) for index in range(len(m))]

    failures = tuple(failure for _, failure in outcomes if failure is not None)
    for failure in failures:
        log.warning("Skipping `%s`: %s: %s", failure.path, failure.error, failure.message)
    if strict and failures:
        raise StrictModeFailure(
            f"{len(failures)} of {len(m)} file(s) failed; first: `{failures[0].path}` "
            f"({failures[0].error}: {failures[0].message})."
        )

    kept = [(index, vector) for index, (vector, _) in enumerate(outcomes) if vector is not None]
    features = (
        np.stack([vector.values for _, vector in kept])
        if kept
        else np.empty((0, config.feature_dim))
    )
    labels = np.array([m.entries[index].class_index for index, _ in kept], dtype=int)
    echo = config.dict()
    echo["seed"] = seed if isinstance(seed, int) else None
    log.info("Featurized %d of %d file(s).", len(kept), len(m))

    fs = FeatureSet(
        features=features,
        labels=labels,
        num_classes=m.num_classes,
        config=echo,
        label_table=m.label_table,
        entry_indices=np.array([index for index, _ in kept], dtype=int),
    )
    return FeaturizeResult(fs, failures)

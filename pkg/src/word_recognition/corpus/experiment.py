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

"""Training on feature sets and the architecture sweep."""

from __future__ import annotations
from dataclasses import dataclass
import logging
from typing import TYPE_CHECKING, Callable, List, Optional, Tuple

from word_recognition.corpus.evaluation import evaluate
from word_recognition.framework.errors import DimensionMismatch, EmptyTrainingSet
from word_recognition.network.architecture import param_count, variants
from word_recognition.network.model import init_network
from word_recognition.network.scaling import FeatureScaler
from word_recognition.network.training import sgd_train

if TYPE_CHECKING:
    from word_recognition.corpus.featureset import FeatureSet
    from word_recognition.framework.config import TrainConfig
    from word_recognition.network.architecture import Architecture
    from word_recognition.network.model import Network
    from word_recognition.network.training import EpochRecord


log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrainedModel:
    network: Network
    scaler: Optional[FeatureScaler]
    history: Tuple[EpochRecord, ...]

    @property
    def final_train_accuracy(self) -> float:
        return self.history[-1].train_accuracy


@dataclass(frozen=True)
class SweepRecord:
    family: str
    hidden_layers: Tuple[int, ...]
    num_parameters: int
    train_accuracy: float
    test_accuracy: float


def train_on_featureset(
    train_fs: FeatureSet,
    arch: Architecture,
    cfg: TrainConfig,
    progress: Optional[Callable[[EpochRecord], None]] = None,
) -> TrainedModel:
    """
    Initialize ``arch`` from ``cfg.seed`` and train it on ``train_fs``, standardizing the
    features first unless ``cfg.standardize`` is off.
    """
    if len(train_fs) == 0:
        raise EmptyTrainingSet("The training feature set has no rows.")
    if arch.input_size != train_fs.feature_dim or arch.output_size != train_fs.num_classes:
        raise DimensionMismatch(
            f"Architecture {arch} does not fit features of dimension {train_fs.feature_dim} "
            f"with {train_fs.num_classes} classes."
        )
    scaler = FeatureScaler.fit(train_fs.features) if cfg.standardize else None
    x = scaler.transform(train_fs.features) if scaler is not None else train_fs.features
    net = init_network(arch, cfg.seed, cfg.init_scale_rule)
    result = sgd_train(net, x, train_fs.labels, cfg, progress)
    return TrainedModel(result.network, scaler, result.history)


def sweep_architectures(
    family: str, train_fs: FeatureSet, test_fs: FeatureSet, cfg: TrainConfig
) -> List[SweepRecord]:
    """Train and test every hidden-layer variant of ``family`` with the same settings."""
    records = []
    for arch in variants(family, train_fs.feature_dim, train_fs.num_classes):
        model = train_on_featureset(train_fs, arch, cfg)
        record = SweepRecord(
            family=family,
            hidden_layers=arch.layer_sizes[1:-1],
            num_parameters=param_count(arch),
            train_accuracy=model.final_train_accuracy,
            test_accuracy=evaluate(model.network, test_fs, model.scaler).accuracy,
        )
        log.info(
            "%s %s: train accuracy %.4f, test accuracy %.4f",
            family,
            arch,
            record.train_accuracy,
            record.test_accuracy,
        )
        records.append(record)
    return records

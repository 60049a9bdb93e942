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

"""Per-sample stochastic gradient descent with a per-epoch learning-rate decay."""

from __future__ import annotations
from dataclasses import dataclass
import logging
import numpy as np
from typing import TYPE_CHECKING, Callable, List, Optional, Tuple

from word_recognition.framework.errors import (
    DimensionMismatch,
    EmptyTrainingSet,
    NumericalInstability,
)
from word_recognition.framework.seeding import make_rng
from word_recognition.network.model import Network, backpropagate, propagate

if TYPE_CHECKING:
    from word_recognition.framework.config import TrainConfig
    from word_recognition.utils.typingx import ArrayLike, FloatArray, IntArray


log = logging.getLogger(__name__)

SHUFFLE_STREAM: int = 1


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    lr: float
    mean_loss: float
    train_accuracy: float
    updates: int


@dataclass(frozen=True, eq=False)
class TrainResult:
    network: Network
    history: Tuple[EpochRecord, ...]


def learning_rate(lr0: float, decay: float, completed_epochs: int) -> float:
    """Learning rate in force after ``completed_epochs`` full passes."""
    lr = lr0
    for _ in range(completed_epochs):
        lr *= decay
    return lr


def sgd_step(net: Network, x: ArrayLike, target: ArrayLike, lr: float) -> Network:
    """One update ``theta <- theta - lr * grad`` on a single sample."""
    weights = [w.copy() for w in net.weights]
    biases = [b.copy() for b in net.biases]
    _update(weights, biases, np.asarray(x, dtype=np.float64), np.asarray(target), lr)
    return Network(tuple(weights), tuple(biases))


def _update(
    weights: List[FloatArray],
    biases: List[FloatArray],
    x: FloatArray,
    target: FloatArray,
    lr: float,
) -> None:
    grad_w, grad_b = backpropagate(weights, propagate(weights, biases, x), target)
    for layer in range(len(weights)):
        weights[layer] -= lr * grad_w[layer]
        biases[layer] -= lr * grad_b[layer]


def score(
    weights: List[FloatArray], biases: List[FloatArray], x: FloatArray, labels: IntArray
) -> Tuple[float, float]:
    """Mean squared-error loss and accuracy over a batch."""
    outputs = propagate(weights, biases, x)[-1]
    targets = np.eye(outputs.shape[1])[labels]
    mean_loss = float(np.mean(np.sum((outputs - targets) ** 2, axis=1)))
    accuracy = float(np.mean(np.argmax(outputs, axis=1) == labels))
    return mean_loss, accuracy


def sgd_train(
    net: Network,
    features: ArrayLike,
    labels: ArrayLike,
    cfg: TrainConfig,
    progress: Optional[Callable[[EpochRecord], None]] = None,
) -> TrainResult:
    """
    Train a copy of ``net`` with batch size one.

    Every epoch visits the training set in a fresh permutation drawn from a stream derived from
    ``cfg.seed``, then multiplies the learning rate by ``cfg.decay``. Training stops after
    ``cfg.epochs`` epochs or ``cfg.max_updates`` parameter updates, whichever comes first.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyTrainingSet(f"Expected a non-empty sample matrix, got shape {x.shape}.")
    arch = net.architecture
    if x.shape[1] != arch.input_size:
        raise DimensionMismatch(
            f"Features have {x.shape[1]} dimensions but the network {arch} expects "
            f"{arch.input_size}."
        )
    if y.shape != (x.shape[0],) or np.any(y < 0) or np.any(y >= arch.output_size):
        raise DimensionMismatch(
            f"Expected {x.shape[0]} class indices in [0, {arch.output_size}), got shape {y.shape}."
        )

    targets = np.eye(arch.output_size)[y]
    weights = [w.copy() for w in net.weights]
    biases = [b.copy() for b in net.biases]
    rng = make_rng(cfg.seed, SHUFFLE_STREAM)
    lr = cfg.lr0
    updates = 0
    history: List[EpochRecord] = []

    for epoch in range(1, cfg.epochs + 1):
        for index in rng.permutation(x.shape[0]):
            if cfg.max_updates is not None and updates >= cfg.max_updates:
                break
            _update(weights, biases, x[index], targets[index], lr)
            updates += 1

        if not all(np.all(np.isfinite(p)) for p in (*weights, *biases)):
            raise NumericalInstability(f"Non-finite parameters after epoch {epoch}.")
        mean_loss, accuracy = score(weights, biases, x, y)
        record = EpochRecord(epoch, lr, mean_loss, accuracy, updates)
        history.append(record)
        log.info(
            "epoch %d: lr %.6g, mean loss %.6f, train accuracy %.4f",
            epoch,
            lr,
            mean_loss,
            accuracy,
        )
        if progress is not None:
            progress(record)

        lr *= cfg.decay
        if cfg.max_updates is not None and updates >= cfg.max_updates:
            break

    return TrainResult(Network(tuple(weights), tuple(biases)), tuple(history))

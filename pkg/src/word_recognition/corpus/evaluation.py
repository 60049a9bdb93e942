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
from dataclasses import dataclass
import numpy as np
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

from word_recognition.framework.errors import DimensionMismatch
from word_recognition.network.model import propagate

if TYPE_CHECKING:
    from word_recognition.corpus.featureset import FeatureSet
    from word_recognition.network.model import Network
    from word_recognition.network.scaling import FeatureScaler
    from word_recognition.utils.typingx import ArrayLike, IntArray


@dataclass(frozen=True, eq=False)
class EvalReport:
    """
    Confusion counts with rows indexed by the true class and columns by the predicted class.

    Per-class accuracies are ``None`` for classes without test samples.
    """

    accuracy: float
    confusion: IntArray
    per_class_accuracy: Tuple[Optional[float], ...]
    sample_count: int
    label_table: Tuple[str, ...] = ()

    @classmethod
    def from_predictions(
        cls,
        truth: ArrayLike,
        predicted: ArrayLike,
        num_classes: int,
        label_table: Tuple[str, ...] = (),
    ) -> EvalReport:
        t = np.asarray(truth, dtype=int)
        p = np.asarray(predicted, dtype=int)
        if t.shape != p.shape:
            raise DimensionMismatch(f"Got {p.size} predictions for {t.size} samples.")
        if t.size == 0:
            raise ValueError("Cannot evaluate on an empty feature set.")
        confusion = np.zeros((num_classes, num_classes), dtype=int)
        np.add.at(confusion, (t, p), 1)
        totals = confusion.sum(axis=1)
        per_class = tuple(
            float(confusion[c, c] / totals[c]) if totals[c] > 0 else None
            for c in range(num_classes)
        )
        return cls(
            accuracy=float(np.trace(confusion) / t.size),
            confusion=confusion,
            per_class_accuracy=per_class,
            sample_count=int(t.size),
            label_table=label_table,
        )

    @property
    def num_classes(self) -> int:
        return self.confusion.shape[0]

    @property
    def num_correct(self) -> int:
        return int(np.trace(self.confusion))

    def label(self, class_index: int) -> str:
        return self.label_table[class_index] if self.label_table else str(class_index)

    def to_json(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "sample_count": self.sample_count,
            "labels": [self.label(c) for c in range(self.num_classes)],
            "per_class": list(self.per_class_accuracy),
            "confusion": self.confusion.tolist(),
        }

    def to_text(self) -> str:
        width = max([5] + [len(self.label(c)) for c in range(self.num_classes)])
        lines: List[str] = [
            f"accuracy: {100 * self.accuracy:.2f}% ({self.num_correct}/{self.sample_count})",
            f"{'label':<{width}}  correct  total  accuracy",
        ]
        totals = self.confusion.sum(axis=1)
        for c, acc in enumerate(self.per_class_accuracy):
            acc_str = "-" if acc is None else f"{100 * acc:.2f}%"
            lines.append(
                f"{self.label(c):<{width}}  {self.confusion[c, c]:>7d}  {totals[c]:>5d}  "
                f"{acc_str:>8}"
            )
        return "\n".join(lines)


def evaluate(net: Network, fs: FeatureSet, scaler: Optional[FeatureScaler] = None) -> EvalReport:
    arch = net.architecture
    if fs.feature_dim != arch.input_size:
        raise DimensionMismatch(
            f"Network expects {arch.input_size} features, the feature set has {fs.feature_dim}."
        )
    if fs.num_classes != arch.output_size:
        raise DimensionMismatch(
            f"Network has {arch.output_size} outputs, the feature set has {fs.num_classes} classes."
        )
    x = scaler.transform(fs.features) if scaler is not None else fs.features
    outputs = propagate(net.weights, net.biases, x)[-1]
    return EvalReport.from_predictions(
        fs.labels, np.argmax(outputs, axis=1), fs.num_classes, fs.label_table
    )

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

"""In-memory feature matrices and their CSV persistence."""

from __future__ import annotations
import csv
from dataclasses import dataclass, field
import json
import numpy as np
from typing import TYPE_CHECKING, Any, Dict, Iterator, Optional, Tuple

from word_recognition.framework.errors import IoFailure, SchemaMismatch, ShapeMismatch

if TYPE_CHECKING:
    from collections.abc import Sequence

    from word_recognition.utils.typingx import FloatArray, IntArray, PathLike


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """
    One row of ``feature_dim`` values per utterance, labelled with its class index.

    ``config`` echoes the feature extraction settings that produced the rows.
    ``entry_indices`` maps every row back to its manifest entry and is not persisted.
    """

    features: FloatArray
    labels: IntArray
    num_classes: int
    config: Dict[str, Any] = field(default_factory=dict)
    label_table: Tuple[str, ...] = ()
    entry_indices: Optional[IntArray] = None

    def __post_init__(self) -> None:
        if self.features.ndim != 2:
            raise ShapeMismatch(f"Features must be a matrix, got shape {self.features.shape}.")
        if self.labels.shape != (self.features.shape[0],):
            raise ShapeMismatch(
                f"Got {self.labels.shape[0]} labels for {self.features.shape[0]} feature rows."
            )
        if self.labels.size > 0 and (
            self.labels.min() < 0 or self.labels.max() >= self.num_classes
        ):
            raise ShapeMismatch(f"Class indices must lie in [0, {self.num_classes}).")
        if self.label_table and len(self.label_table) != self.num_classes:
            raise ShapeMismatch(
                f"Label table holds {len(self.label_table)} labels for {self.num_classes} classes."
            )
        if not np.all(np.isfinite(self.features)):
            raise ValueError("Feature set contains non-finite values.")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def rows(self) -> Iterator[Tuple[FloatArray, int]]:
        for values, label in zip(self.features, self.labels):
            yield values, int(label)

    def subset(self, indices: Sequence[int]) -> FeatureSet:
        idx = np.asarray(indices, dtype=int)
        return FeatureSet(
            features=self.features[idx],
            labels=self.labels[idx],
            num_classes=self.num_classes,
            config=dict(self.config),
            label_table=self.label_table,
            entry_indices=None if self.entry_indices is None else self.entry_indices[idx],
        )


def write_featureset(fs: FeatureSet, path: PathLike) -> None:
    """A JSON header line followed by ``class_index,value_1,...,value_D`` rows."""
    header = {
        "feature_dim": fs.feature_dim,
        "num_classes": fs.num_classes,
        "label_table": list(fs.label_table),
        "config": fs.config,
    }
    try:
        with open(path, "w", newline="", encoding="utf-8") as csv_file:
            csv_file.write(json.dumps(header) + "\n")
            writer = csv.writer(csv_file, delimiter=",")
            for values, label in fs.rows():
                writer.writerow([label] + values.tolist())
    except OSError as err:
        raise IoFailure(f"Cannot write feature set `{path}`: {err}.") from err


def read_featureset(path: PathLike) -> FeatureSet:
    try:
        with open(path, "r", newline="", encoding="utf-8") as csv_file:
            first_line = csv_file.readline()
            rows = list(csv.reader(csv_file, delimiter=","))
    except OSError as err:
        raise IoFailure(f"Cannot read feature set `{path}`: {err}.") from err

    try:
        header = json.loads(first_line)
        feature_dim = int(header["feature_dim"])
        num_classes = int(header["num_classes"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
        raise SchemaMismatch(f"`{path}` does not start with a feature set header.") from err

    features = np.empty((len(rows), feature_dim))
    labels = np.empty(len(rows), dtype=int)
    for i, row in enumerate(rows):
        if len(row) != feature_dim + 1:
            raise ShapeMismatch(
                f"`{path}`, row {i + 1}: expected {feature_dim + 1} fields, got {len(row)}."
            )
        labels[i] = int(row[0])
        features[i] = [float(value) for value in row[1:]]

    return FeatureSet(
        features=features,
        labels=labels,
        num_classes=num_classes,
        config=dict(header.get("config", {})),
        label_table=tuple(header.get("label_table", ())),
    )

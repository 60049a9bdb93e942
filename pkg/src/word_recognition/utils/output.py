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
import csv
from typing import TYPE_CHECKING

from word_recognition.framework.errors import IoFailure

if TYPE_CHECKING:
    from typing import Any, Iterable, Optional, Sequence

    from word_recognition.corpus.evaluation import EvalReport
    from word_recognition.corpus.experiment import SweepRecord
    from word_recognition.corpus.featurize import FeaturizeFailure
    from word_recognition.corpus.manifest import Manifest
    from word_recognition.network.architecture import Architecture
    from word_recognition.network.training import EpochRecord
    from word_recognition.utils.typingx import FloatArray, PathLike


def _write_rows(
    output_file: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    try:
        with open(output_file, "w", newline="") as csv_file:
            writer = csv.writer(csv_file, delimiter=",")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as err:
        raise IoFailure(f"Cannot write `{output_file}`: {err}.") from err


def write_history_to_csv(output_file: PathLike, history: Sequence[EpochRecord]) -> None:
    """Write the per-epoch training history to a CSV file."""
    _write_rows(
        output_file,
        ("epoch", "lr", "mean_loss", "train_accuracy"),
        ((r.epoch, r.lr, r.mean_loss, r.train_accuracy) for r in history),
    )


def write_sweep_to_csv(output_file: PathLike, records: Sequence[SweepRecord]) -> None:
    _write_rows(
        output_file,
        ("family", "hidden_layers", "num_parameters", "train_accuracy", "test_accuracy"),
        (
            (
                r.family,
                "-".join(str(size) for size in r.hidden_layers),
                r.num_parameters,
                r.train_accuracy,
                r.test_accuracy,
            )
            for r in records
        ),
    )


def write_failures_to_csv(output_file: PathLike, failures: Sequence[FeaturizeFailure]) -> None:
    _write_rows(
        output_file,
        ("entry_index", "path", "error", "message"),
        ((f.entry_index, f.path, f.error, f.message) for f in failures),
    )


def print_corpus(
    m: Manifest, train: Optional[Manifest] = None, test: Optional[Manifest] = None
) -> None:
    print(f"== Corpus:")
    print(f"   - Number of classes: {m.num_classes}")
    print(f"   - Number of files: {len(m)}")
    if m.skipped:
        print(f"   - Skipped files: {len(m.skipped)}")
    if train is not None and test is not None:
        print(f"   - Train/test split: {len(train)}/{len(test)}")


def print_featurization(
    num_rows: int, feature_dim: int, failures: Sequence[FeaturizeFailure]
) -> None:
    print(f"== Featurization:")
    print(f"   - Feature vectors: {num_rows}")
    print(f"   - Feature dimension: {feature_dim}")
    print(f"   - Failed files: {len(failures)}")
    for failure in failures:
        print(f"     {failure.path}: {failure.error}: {failure.message}")


def print_training(
    arch: Architecture, num_parameters: int, history: Sequence[EpochRecord]
) -> None:
    """Summarize a training run: architecture, parameter count and final epoch."""
    print(f"== Training:")
    print(f"   - Architecture: {arch}")
    print(f"   - Total parameters: {num_parameters:,}")
    print(f"   - Epochs: {len(history)}")
    if history:
        last = history[-1]
        print(f"   - Updates: {last.updates}")
        print(f"   - Final mean loss: {last.mean_loss:.6f}")
        print(f"   - Final train accuracy: {100 * last.train_accuracy:.2f}%")


def print_evaluation(report: EvalReport) -> None:
    print(f"== Evaluation:")
    for line in report.to_text().splitlines():
        print(f"   {line}")


def print_prediction(label_table: Sequence[str], scores: FloatArray) -> None:
    """Print the top label, then every class score from highest to lowest."""
    order = sorted(range(len(scores)), key=lambda c: (-scores[c], c))
    print(f"{label_table[order[0]]}")
    for c in order:
        print(f"   - {label_table[c]}: {scores[c]:.6f}")


def print_sweep(records: Sequence[SweepRecord]) -> None:
    print(f"== Architecture sweep:")
    for r in records:
        hidden = ", ".join(str(size) for size in r.hidden_layers)
        print(
            f"   - ({hidden}): {r.num_parameters:,} parameters, "
            f"train {100 * r.train_accuracy:.2f}%, test {100 * r.test_accuracy:.2f}%"
        )

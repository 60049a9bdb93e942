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
from dataclasses import dataclass
import logging
import os
import numpy as np
from typing import TYPE_CHECKING, Dict, List, Tuple

from word_recognition.framework.errors import (
    ClassTooSmall,
    EmptyCorpus,
    InvalidFraction,
    IoFailure,
    MissingRoot,
    SchemaMismatch,
)
from word_recognition.framework.seeding import make_rng

if TYPE_CHECKING:
    from collections.abc import Sequence

    from word_recognition.utils.typingx import PathLike, SeedLike


log = logging.getLogger(__name__)

MANIFEST_HEADER = ("path", "label", "class_index")


def utf8_order(text: str) -> bytes:
    return text.encode("utf-8")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: str
    class_index: int


@dataclass(frozen=True, eq=False)
class Manifest:
    """
    Labelled recordings. Class indices follow the byte order of the UTF-8 encoded labels.

    ``skipped`` lists the files found while scanning a corpus that are not WAV recordings.
    """

    entries: Tuple[ManifestEntry, ...]
    label_table: Tuple[str, ...]
    skipped: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        paths = [entry.path for entry in self.entries]
        if len(set(paths)) != len(paths):
            raise ValueError("Manifest contains duplicate file paths.")
        for entry in self.entries:
            if not 0 <= entry.class_index < len(self.label_table) or (
                self.label_table[entry.class_index] != entry.label
            ):
                raise ValueError(
                    f"Entry `{entry.path}`: label `{entry.label}` does not match class index "
                    f"{entry.class_index}."
                )

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def num_classes(self) -> int:
        return len(self.label_table)

    def class_counts(self) -> List[int]:
        counts = [0] * self.num_classes
        for entry in self.entries:
            counts[entry.class_index] += 1
        return counts

    def subset(self, indices: Sequence[int]) -> Manifest:
        return Manifest(tuple(self.entries[i] for i in indices), self.label_table)


def scan_corpus(root: PathLike) -> Manifest:
    """
    Collect ``root/<label>/<name>.wav`` recordings.

    Labels are the names of the sub-directories holding at least one WAV file. Other files are
    skipped with a warning and listed in ``Manifest.skipped``.
    """
    if not os.path.isdir(root):
        raise MissingRoot(f"Corpus directory `{root}` does not exist.")

    found: Dict[str, List[str]] = {}
    skipped: List[str] = []
    for item in sorted(os.scandir(root), key=lambda item: utf8_order(item.name)):
        if not item.is_dir():
            skipped.append(item.path)
            continue
        wavs = []
        for child in sorted(os.scandir(item.path), key=lambda child: utf8_order(child.name)):
            if child.is_file() and child.name.lower().endswith(".wav"):
                wavs.append(child.path)
            else:
                skipped.append(child.path)
        if wavs:
            found[item.name] = wavs
    for path in skipped:
        log.warning("Skipping `%s`: not a WAV file inside a label directory.", path)
    if not found:
        raise EmptyCorpus(f"No WAV file found under `{root}`.")

    label_table = tuple(sorted(found, key=utf8_order))
    entries = tuple(
        ManifestEntry(path, label, class_index)
        for class_index, label in enumerate(label_table)
        for path in found[label]
    )
    return Manifest(entries, label_table, tuple(skipped))


def stratified_split(
    m: Manifest, train_fraction: float = 2 / 3, seed: SeedLike = 0
) -> Tuple[Manifest, Manifest]:
    """
    Send ``round(n * train_fraction)`` recordings of every class to the training side (at least
    one, and at least one left for testing) and the rest to the test side. Both sides keep the
    manifest order.
    """
    if not 0 < train_fraction < 1:
        raise InvalidFraction(f"Train fraction must lie in (0, 1), got {train_fraction}.")
    by_class: List[List[int]] = [[] for _ in range(m.num_classes)]
    for index, entry in enumerate(m.entries):
        by_class[entry.class_index].append(index)

    rng = make_rng(seed)
    train: List[int] = []
    for class_index, indices in enumerate(by_class):
        if len(indices) < 2:
            raise ClassTooSmall(
                f"Class `{m.label_table[class_index]}` has {len(indices)} sample(s); "
                f"at least 2 are needed to split."
            )
        n_train = int(np.floor(len(indices) * train_fraction + 0.5))
        n_train = min(max(n_train, 1), len(indices) - 1)
        train.extend(int(i) for i in rng.permutation(indices)[:n_train])

    train_set = set(train)
    test = [index for index in range(len(m)) if index not in train_set]
    return m.subset(sorted(train)), m.subset(test)


def write_manifest(m: Manifest, path: PathLike) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as csv_file:
            writer = csv.writer(csv_file, delimiter=",")
            writer.writerow(MANIFEST_HEADER)
            for entry in m.entries:
                writer.writerow((entry.path, entry.label, entry.class_index))
    except OSError as err:
        raise IoFailure(f"Cannot write manifest `{path}`: {err}.") from err


def read_manifest(path: PathLike) -> Manifest:
    try:
        with open(path, "r", newline="", encoding="utf-8") as csv_file:
            rows = list(csv.reader(csv_file, delimiter=","))
    except OSError as err:
        raise IoFailure(f"Cannot read manifest `{path}`: {err}.") from err
    if not rows or tuple(rows[0]) != MANIFEST_HEADER:
        raise SchemaMismatch(
            f"`{path}` does not start with the header {','.join(MANIFEST_HEADER)}."
        )

    entries = tuple(ManifestEntry(row[0], row[1], int(row[2])) for row in rows[1:])
    labels = {entry.class_index: entry.label for entry in entries}
    if sorted(labels) != list(range(len(labels))):
        raise SchemaMismatch(f"`{path}`: class indices are not contiguous from 0.")
    return Manifest(entries, tuple(labels[i] for i in range(len(labels))))

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
import numpy as np
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from word_recognition.utils.typingx import SeedLike


def derive_seed(seed: SeedLike, *keys: int) -> np.random.SeedSequence:
    """
    Derive an independent child of ``seed`` identified by ``keys``.

    Unlike ``SeedSequence.spawn``, the result depends only on ``seed`` and ``keys``, so the same
    child is obtained regardless of how many streams were derived before, or from which thread.
    """
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + keys)
    if int(seed) < 0:
        raise ValueError(f"Seeds must be non-negative, got {seed}.")
    return np.random.SeedSequence(int(seed), spawn_key=keys)


def make_rng(seed: SeedLike, *keys: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *keys))

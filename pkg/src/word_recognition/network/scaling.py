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
from typing import TYPE_CHECKING

from word_recognition.framework.errors import DimensionMismatch

if TYPE_CHECKING:
    from word_recognition.utils.typingx import ArrayLike, FloatArray


@dataclass(frozen=True, eq=False)
class FeatureScaler:
    """Per-dimension standardization ``(x - mean) / scale`` fitted on training features."""

    mean: FloatArray
    scale: FloatArray

    def __post_init__(self) -> None:
        if self.mean.shape != self.scale.shape or self.mean.ndim != 1:
            raise ValueError(f"Mismatching scaler shapes {self.mean.shape}, {self.scale.shape}.")
        if np.any(self.scale <= 0):
            raise ValueError("Scaler scales must be positive.")

    @classmethod
    def fit(cls, features: ArrayLike) -> FeatureScaler:
        x = np.asarray(features, dtype=np.float64)
        std = x.std(axis=0)
        return cls(x.mean(axis=0), np.where(std > 0, std, 1.0))

    @classmethod
    def identity(cls, dim: int) -> FeatureScaler:
        return cls(np.zeros(dim), np.ones(dim))

    def transform(self, features: ArrayLike) -> FloatArray:
        x = np.asarray(features, dtype=np.float64)
        if x.shape[-1] != self.mean.size:
            raise DimensionMismatch(
                f"Scaler fitted on {self.mean.size} dimensions, got {x.shape[-1]}."
            )
        return (x - self.mean) / self.scale  # type: ignore[no-any-return]

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
from typing import Optional, TYPE_CHECKING
import warnings

if TYPE_CHECKING:
    from collections.abc import Mapping

    from word_recognition.utils.typingx import ArrayLike, FloatArray


DEFAULT_ATOL: float = 1e-12
DEFAULT_RTOL: float = 1e-6
RELATIVE_ERROR_FLOOR: float = 1e-8


def relative_error(
    src_field: ArrayLike, trg_field: ArrayLike, floor: float = RELATIVE_ERROR_FLOOR
) -> FloatArray:
    """Pointwise ``|src - trg| / max(|src|, |trg|, floor)``."""
    src = np.asarray(src_field, dtype=np.float64)
    trg = np.asarray(trg_field, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(src), np.abs(trg)), floor)
    return np.abs(src - trg) / scale  # type: ignore[no-any-return]


def validate_field(
    name: str,
    src_field: FloatArray,
    trg_field: FloatArray,
    atol: Optional[float] = None,
    rtol: Optional[float] = None,
) -> bool:
    """Print how far ``src_field`` is from ``trg_field`` and whether it is within tolerance."""
    assert src_field.shape == trg_field.shape

    abs_diff_max = float(np.abs(src_field - trg_field).max(initial=0.0))
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore")
        rel_diff_max = float(relative_error(src_field, trg_field).max(initial=0.0))

    atol = atol or DEFAULT_ATOL
    rtol = rtol or DEFAULT_RTOL
    passed = abs_diff_max < atol or rel_diff_max < rtol
    print(
        f"   - {name:20s}:"
        f"\033[9{2 if abs_diff_max < atol else 1}m max abs diff = {abs_diff_max:.5E}\033[00m,"
        f"\033[9{2 if rel_diff_max < rtol else 1}m max rel diff = {rel_diff_max:.5E}\033[00m,"
        f"\033[9{2 if passed else 1}m passed = {passed}\033[00m"
    )
    return passed


def validate(
    src: Mapping[str, FloatArray],
    trg: Mapping[str, FloatArray],
    atol: Optional[float] = None,
    rtol: Optional[float] = None,
) -> bool:
    common_keys = [key for key in src if key in trg]
    results = [validate_field(key, src[key], trg[key], atol=atol, rtol=rtol) for key in common_keys]
    return all(results)

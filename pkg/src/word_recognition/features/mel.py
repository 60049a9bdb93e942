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
from functools import lru_cache
import numpy as np
from typing import TYPE_CHECKING, Union, overload

from word_recognition.framework.errors import NegativeFrequency, TooManyFilters

if TYPE_CHECKING:
    from word_recognition.utils.typingx import FloatArray, IntArray


@overload
def hz_to_mel(f: float) -> float:
    ...


@overload
def hz_to_mel(f: FloatArray) -> FloatArray:
    ...


def hz_to_mel(f: Union[float, FloatArray]) -> Union[float, FloatArray]:
    """Mel value of a frequency in Hz: ``2595 log10(1 + f / 700)``."""
    f_arr = np.asarray(f, dtype=np.float64)
    if np.any(f_arr < 0):
        raise NegativeFrequency(f"Frequencies must be non-negative, got {f}.")
    mel = 2595.0 * np.log10(1.0 + f_arr / 700.0)
    return float(mel) if mel.ndim == 0 else mel


@overload
def mel_to_hz(m: float) -> float:
    ...


@overload
def mel_to_hz(m: FloatArray) -> FloatArray:
    ...


def mel_to_hz(m: Union[float, FloatArray]) -> Union[float, FloatArray]:
    """Inverse of :func:`hz_to_mel`."""
    m_arr = np.asarray(m, dtype=np.float64)
    if np.any(m_arr < 0):
        raise NegativeFrequency(f"Mel values must be non-negative, got {m}.")
    f = 700.0 * (10.0 ** (m_arr / 2595.0) - 1.0)
    return float(f) if f.ndim == 0 else f


@dataclass(frozen=True, eq=False)
class MelFilterbank:
    """Triangular filters on the mel scale, one row per filter over the non-negative DFT bins."""

    weights: FloatArray
    num_filters: int
    fft_size: int
    rate: int
    center_bins: IntArray

    @property
    def num_bins(self) -> int:
        return self.fft_size // 2 + 1


@lru_cache(maxsize=16)
def build_filterbank(
    num_filters: int = 40, fft_size: int = 512, rate: int = 10000
) -> MelFilterbank:
    """
    Build ``num_filters`` unnormalized triangular filters.

    ``num_filters + 2`` points equally spaced in mel between 0 Hz and ``rate / 2`` are snapped to
    the nearest DFT bin; filter ``i`` rises from point ``i`` to a peak of 1 at point ``i + 1``
    and falls back to zero at point ``i + 2``.
    """
    if num_filters < 1:
        raise ValueError(f"At least one filter is required, got {num_filters}.")
    if fft_size < 2 or fft_size & (fft_size - 1) != 0:
        raise ValueError(f"FFT size must be a power of two, got {fft_size}.")
    if rate <= 0:
        raise ValueError(f"Sampling rate must be positive, got {rate}.")

    mel_points = np.linspace(0.0, hz_to_mel(rate / 2), num_filters + 2)
    hz_points = mel_to_hz(mel_points)
    bins = np.floor(hz_points * fft_size / rate + 0.5).astype(np.int64)
    if np.any(np.diff(bins) <= 0):
        collapsed = int(np.flatnonzero(np.diff(bins) <= 0)[0])
        raise TooManyFilters(
            f"{num_filters} filters do not fit {fft_size // 2 + 1} bins at {rate} Hz: "
            f"points {collapsed} and {collapsed + 1} share bin {bins[collapsed]}."
        )

    k = np.arange(fft_size // 2 + 1, dtype=np.float64)
    weights = np.stack(
        [
            np.interp(k, bins[i : i + 3].astype(np.float64), [0.0, 1.0, 0.0], left=0.0, right=0.0)
            for i in range(num_filters)
        ]
    )
    weights.flags.writeable = False
    centers = bins[1:-1].copy()
    centers.flags.writeable = False
    return MelFilterbank(
        weights=weights,
        num_filters=num_filters,
        fft_size=fft_size,
        rate=rate,
        center_bins=centers,
    )

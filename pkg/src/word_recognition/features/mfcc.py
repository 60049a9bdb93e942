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
import scipy.fft
from typing import TYPE_CHECKING

from word_recognition.audio.preprocessing import frame_and_window
from word_recognition.features.mel import build_filterbank
from word_recognition.framework.errors import DimensionMismatch, FrameTooLong

if TYPE_CHECKING:
    from word_recognition.audio.wav import Signal
    from word_recognition.features.mel import MelFilterbank
    from word_recognition.framework.config import FeatureConfig
    from word_recognition.utils.typingx import ArrayLike, FloatArray


LOG_FLOOR: float = 1e-12


@dataclass(frozen=True, eq=False)
class MfccMatrix:
    """Cepstral coefficients, one row per analysis frame."""

    coeffs: FloatArray

    def __post_init__(self) -> None:
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] < 1:
            raise ValueError(f"Expected a non-empty N x C matrix, got shape {self.coeffs.shape}.")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("MFCC matrix contains non-finite values.")

    @property
    def num_frames(self) -> int:
        return self.coeffs.shape[0]

    @property
    def coeff_count(self) -> int:
        return self.coeffs.shape[1]


def power_spectrum(frame: ArrayLike, fft_size: int = 512) -> FloatArray:
    """
    Squared DFT magnitude of the zero-padded frame(s) at bins ``0 .. fft_size / 2``.

    ``frame`` is either one frame or a matrix holding one frame per row.
    """
    x = np.asarray(frame, dtype=np.float64)
    if x.shape[-1] > fft_size:
        raise FrameTooLong(f"Frame of {x.shape[-1]} samples exceeds the FFT size {fft_size}.")
    spectrum = scipy.fft.rfft(x, n=fft_size, axis=-1)
    return spectrum.real**2 + spectrum.imag**2


def cepstra_from_spectrum(
    spectrum: ArrayLike, fb: MelFilterbank, coeff_count: int = 14
) -> FloatArray:
    """
    Log mel-filterbank energies followed by the orthonormal DCT-II; ``c0`` is kept.

    ``spectrum`` is either one power spectrum or a matrix holding one spectrum per row.
    """
    p = np.asarray(spectrum, dtype=np.float64)
    if p.shape[-1] != fb.num_bins:
        raise DimensionMismatch(
            f"Spectrum has {p.shape[-1]} bins but the filterbank expects {fb.num_bins}."
        )
    if not 1 <= coeff_count <= fb.num_filters:
        raise ValueError(f"Coefficient count must lie in [1, {fb.num_filters}], got {coeff_count}.")
    energies = np.log(np.maximum(p @ fb.weights.T, LOG_FLOOR))
    return scipy.fft.dct(energies, type=2, norm="ortho", axis=-1)[..., :coeff_count]


def mfcc(s: Signal, config: FeatureConfig) -> MfccMatrix:
    """MFCCs of a preprocessed signal; row ``t`` describes frame ``t``."""
    frames = frame_and_window(s, config.frame_len, config.frame_shift)
    fb = build_filterbank(config.num_filters, config.fft_size, s.rate)
    spectra = power_spectrum(frames.frames, config.fft_size)
    return MfccMatrix(cepstra_from_spectrum(spectra, fb, config.coeff_count))

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
import os
import numpy as np
import soundfile as sf
from typing import TYPE_CHECKING

from word_recognition.framework.errors import (
    IoFailure,
    MalformedHeader,
    MissingFile,
    UnsupportedChannels,
    UnsupportedEncoding,
    UnsupportedSampleRate,
)

if TYPE_CHECKING:
    from word_recognition.utils.typingx import ArrayLike, FloatArray, PathLike


MIN_SAMPLE_RATE: int = 8000
MAX_SAMPLE_RATE: int = 48000
PCM_SUBTYPES = ("PCM_U8", "PCM_S8", "PCM_16", "PCM_24")


@dataclass(frozen=True, eq=False)
class Signal:
    """Mono audio samples with their sampling frequency in Hz."""

    samples: FloatArray
    rate: int

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ValueError(f"Sampling rate must be positive, got {self.rate}.")
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"Signal samples must be one-dimensional, got shape {samples.shape}.")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    def with_samples(self, samples: ArrayLike) -> Signal:
        return Signal(np.asarray(samples, dtype=np.float64), self.rate)


def read_wav(path: PathLike) -> Signal:
    """
    Read a mono PCM WAV file.

    Integer samples of ``bits`` bits are scaled to [-1, 1) by dividing by 2**(bits - 1).
    libsndfile left-justifies every PCM depth into 32-bit integers, so dividing the 32-bit
    read by 2**31 is the same exact scaling.
    """
    if not os.path.isfile(path):
        raise MissingFile(f"WAV file `{path}` does not exist.")
    try:
        info = sf.info(str(path))
    except RuntimeError as err:
        raise MalformedHeader(f"Cannot parse the header of `{path}`: {err}.") from err
    if info.format != "WAV":
        raise MalformedHeader(f"`{path}` is not a RIFF/WAVE file (format `{info.format}`).")
    if info.channels != 1:
        raise UnsupportedChannels(f"`{path}` has {info.channels} channels; only mono is supported.")
    if info.subtype not in PCM_SUBTYPES:
        raise UnsupportedEncoding(
            f"`{path}` is encoded as `{info.subtype}`; only 8/16/24-bit integer PCM is supported."
        )
    if not MIN_SAMPLE_RATE <= info.samplerate <= MAX_SAMPLE_RATE:
        raise UnsupportedSampleRate(
            f"`{path}` is sampled at {info.samplerate} Hz, outside "
            f"[{MIN_SAMPLE_RATE}, {MAX_SAMPLE_RATE}] Hz."
        )

    try:
        data, rate = sf.read(str(path), dtype="int32", always_2d=False)
    except RuntimeError as err:
        raise MalformedHeader(f"Cannot decode `{path}`: {err}.") from err
    return Signal(data.astype(np.float64) / 2.0**31, int(rate))


def write_wav(path: PathLike, signal: Signal) -> None:
    """
    Write ``signal`` as 16-bit mono PCM.

    Samples are clipped to [-1, 1] and rounded to the nearest multiple of 2**-15, so that
    ``read_wav`` returns the quantized values exactly.
    """
    clipped = np.clip(signal.samples, -1.0, 1.0)
    pcm = np.clip(np.round(clipped * 32768.0), -32768, 32767).astype(np.int16)
    try:
        sf.write(str(path), pcm, signal.rate, subtype="PCM_16", format="WAV")
    except (RuntimeError, OSError) as err:
        raise IoFailure(f"Cannot write `{path}`: {err}.") from err

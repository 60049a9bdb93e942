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

"""
Preprocessing chain applied to every utterance before feature extraction.

The chain runs in the order down-sampling, peak normalization, energy-based voice activity
detection and silence removal, pre-emphasis; framing and Hamming windowing follow as the first
step of the MFCC computation.
"""

from __future__ import annotations
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window, resample_poly
from typing import TYPE_CHECKING, List

from word_recognition.audio.wav import Signal
from word_recognition.framework.errors import (
    EmptySignal,
    EmptyVoiced,
    InvalidSegments,
    SilentSignal,
    UpsamplingRequested,
    UtteranceTooShort,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from word_recognition.framework.config import FeatureConfig
    from word_recognition.utils.typingx import FloatArray


RESAMPLE_ZERO_CROSSINGS: int = 24


@dataclass(frozen=True)
class Segment:
    """Half-open range ``[start, end)`` of sample indices."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise InvalidSegments(f"Invalid segment [{self.start}, {self.end}).")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, eq=False)
class FrameMatrix:
    """Windowed analysis frames, one per row."""

    frames: FloatArray
    frame_len: int
    shift: int
    rate: int

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]


def _check_not_empty(s: Signal) -> None:
    if len(s) == 0:
        raise EmptySignal("The signal contains no samples.")


@lru_cache(maxsize=16)
def sinc_lowpass(up: int, down: int, zero_crossings: int = RESAMPLE_ZERO_CROSSINGS) -> FloatArray:
    """
    Hann-windowed sinc low-pass filter for a rational ``up / down`` resampler.

    The filter runs at the up-sampled rate; its cutoff sits at half the lower of the two rates
    and it spans ``zero_crossings`` zeros of the sinc on each side. DC gain is one.
    """
    max_rate = max(up, down)
    half_len = zero_crossings * max_rate
    n = np.arange(-half_len, half_len + 1)
    h = np.sinc(n / max_rate) * get_window("hann", 2 * half_len + 1, fftbins=False)
    h /= h.sum()
    h.flags.writeable = False
    return h


def resample(s: Signal, target_rate: int) -> Signal:
    """
    Down-sample ``s`` to ``target_rate`` Hz with a windowed-sinc polyphase resampler.

    The output holds ``floor(len(s) * target_rate / s.rate)`` samples.
    """
    if target_rate <= 0:
        raise ValueError(f"Target rate must be positive, got {target_rate}.")
    if target_rate > s.rate:
        raise UpsamplingRequested(f"Cannot resample from {s.rate} Hz up to {target_rate} Hz.")
    _check_not_empty(s)
    if target_rate == s.rate:
        return s

    g = gcd(s.rate, target_rate)
    up, down = target_rate // g, s.rate // g
    # resample_poly copies the filter before scaling it by ``up``
    out = resample_poly(s.samples, up, down, window=sinc_lowpass(up, down))
    return Signal(out[: len(s) * target_rate // s.rate], target_rate)


def normalize(s: Signal) -> Signal:
    """Divide every sample by the largest absolute sample value."""
    _check_not_empty(s)
    peak = np.max(np.abs(s.samples))
    if peak == 0:
        raise SilentSignal("Cannot normalize an all-zero signal.")
    return s.with_samples(s.samples / peak)


def vad_window_length(rate: int, window_ms: float) -> int:
    return int(np.floor(rate * window_ms / 1000 + 0.5))


def window_energies(s: Signal, window: int) -> FloatArray:
    """Energy of consecutive non-overlapping windows; a trailing partial window is kept."""
    num_windows = -(-len(s) // window)
    padded = np.zeros(num_windows * window)
    padded[: len(s)] = s.samples
    return np.sum(padded.reshape(num_windows, window) ** 2, axis=1)


def voiced_segments(
    s: Signal, window_ms: float = 108.0, threshold_ratio: float = 0.01
) -> List[Segment]:
    """
    Detect voiced regions by thresholding the energy of ``window_ms`` windows.

    A window is voiced when its energy is at least ``threshold_ratio`` times the largest
    window energy; runs of voiced windows merge into a single segment.
    """
    _check_not_empty(s)
    window = vad_window_length(s.rate, window_ms)
    if window < 1:
        raise ValueError(f"A {window_ms} ms window holds no samples at {s.rate} Hz.")
    if not 0 < threshold_ratio < 1:
        raise ValueError(f"Threshold ratio must lie in (0, 1), got {threshold_ratio}.")

    energies = window_energies(s, window)
    max_energy = energies.max()
    if max_energy == 0:
        return []
    voiced = np.concatenate(([0], (energies >= threshold_ratio * max_energy).astype(int), [0]))
    edges = np.diff(voiced)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [
        Segment(int(start) * window, min(int(end) * window, len(s)))
        for start, end in zip(starts, ends)
    ]


def remove_silence(s: Signal, segs: Sequence[Segment]) -> Signal:
    """Concatenate the samples covered by ``segs``, in order."""
    if len(segs) == 0:
        raise EmptyVoiced("No voiced segment: nothing is left after silence removal.")
    previous_end = 0
    for seg in segs:
        if seg.start < previous_end or seg.end > len(s):
            raise InvalidSegments(
                f"Segment [{seg.start}, {seg.end}) overlaps its predecessor or exceeds the "
                f"signal length {len(s)}."
            )
        previous_end = seg.end
    return s.with_samples(np.concatenate([s.samples[seg.start : seg.end] for seg in segs]))


def pre_emphasize(s: Signal, a: float = 0.9375) -> Signal:
    """
    First-order high-pass filter ``y(n) = x(n) - a x(n - 1)`` with ``x(-1) = 0``.

    A constant input ``c`` maps to ``c`` followed by ``c - a c``, which equals ``c (1 - a)`` only
    up to rounding.
    """
    _check_not_empty(s)
    if not 0 <= a < 1:
        raise ValueError(f"Pre-emphasis coefficient must lie in [0, 1), got {a}.")
    x = s.samples
    y = x.copy()
    y[1:] = x[1:] - a * x[:-1]
    return s.with_samples(y)


@lru_cache(maxsize=8)
def hamming_window(frame_len: int) -> FloatArray:
    w = np.hamming(frame_len)
    w.flags.writeable = False
    return w


def frame_and_window(s: Signal, frame_len: int = 300, shift: int = 100) -> FrameMatrix:
    """
    Split ``s`` into frames of ``frame_len`` samples every ``shift`` samples and apply a
    Hamming window to each. Samples that do not fill a last frame are dropped.
    """
    _check_not_empty(s)
    if frame_len < 1 or shift < 1:
        raise ValueError(f"Frame length and shift must be positive, got {frame_len}/{shift}.")
    if len(s) < frame_len:
        raise UtteranceTooShort(
            f"The utterance has {len(s)} samples, fewer than one frame of {frame_len}."
        )
    num_frames = (len(s) - frame_len) // shift + 1
    frames = sliding_window_view(s.samples, frame_len)[::shift][:num_frames]
    return FrameMatrix(frames * hamming_window(frame_len), frame_len, shift, s.rate)


def preprocess(s: Signal, config: FeatureConfig) -> Signal:
    """
    Down-sample, normalize, remove silence and pre-emphasize ``s``.

    A recording of digital silence has no voiced segment and raises ``EmptyVoiced``.
    """
    s = resample(s, config.sample_rate)
    _check_not_empty(s)
    if not np.any(s.samples):
        raise EmptyVoiced("The recording is digital silence: no voiced segment.")
    s = normalize(s)
    segs = voiced_segments(s, config.vad_window_ms, config.vad_threshold_ratio)
    s = remove_silence(s, segs)
    return pre_emphasize(s, config.pre_emphasis_a)

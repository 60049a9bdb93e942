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
Tone-complex pseudo-words for desk-scale experiments.

Every class is a template of two or three tones with class-specific frequencies, amplitude ramps
and envelope. Samples perturb the template's frequencies and duration, add white noise, and are
padded with silence on both sides.
"""

from __future__ import annotations
from dataclasses import dataclass
import logging
import numpy as np
import os
from typing import TYPE_CHECKING, List, Optional, Tuple

from word_recognition.audio.wav import Signal, write_wav
from word_recognition.framework.errors import IoFailure
from word_recognition.framework.seeding import make_rng

if TYPE_CHECKING:
    from word_recognition.utils.typingx import FloatArray, PathLike, SeedLike


log = logging.getLogger(__name__)

SYNTH_RATE: int = 44100
MIN_TONE_HZ: float = 200.0
MAX_TONE_HZ: float = 3500.0
FREQUENCY_JITTER: float = 0.03
DURATION_JITTER: float = 0.2
NOISE_SNR_DB: float = 30.0
PADDING_S: float = 0.25
PEAK_AMPLITUDE: float = 0.8

TEMPLATE_STREAM: int = 0
UTTERANCE_STREAM: int = 1


@dataclass(frozen=True)
class WordTemplate:
    """
    Amplitudes move linearly from ``start_amplitudes`` to ``end_amplitudes`` over the word.

    The envelope rises as ``sin(pi/2 u / peak) ** power`` up to ``peak`` (a fraction of the
    duration) and falls back as a cosine lobe raised to the same power.
    """

    frequencies: Tuple[float, ...]
    phases: Tuple[float, ...]
    start_amplitudes: Tuple[float, ...]
    end_amplitudes: Tuple[float, ...]
    duration: float
    peak: float
    power: float

    @property
    def num_tones(self) -> int:
        return len(self.frequencies)


def _harmonically_unrelated(f: float, others: List[float]) -> bool:
    for g in others:
        ratio = max(f, g) / min(f, g)
        if ratio < 1.15 or abs(ratio - round(ratio)) < 0.08:
            return False
    return True


def make_template(class_index: int, num_classes: int, seed: SeedLike = 0) -> WordTemplate:
    rng = make_rng(seed, TEMPLATE_STREAM, class_index)
    num_tones = int(rng.integers(2, 4))
    span = MAX_TONE_HZ / MIN_TONE_HZ

    # the first tone sits on a class-specific slot of a geometric grid
    frequencies = [
        MIN_TONE_HZ * span ** ((class_index + rng.uniform(0.25, 0.75)) / num_classes)
    ]
    while len(frequencies) < num_tones:
        candidate = MIN_TONE_HZ * span ** rng.uniform(0.0, 1.0)
        if _harmonically_unrelated(candidate, frequencies):
            frequencies.append(candidate)

    start = rng.uniform(0.2, 1.0, size=num_tones)
    end = rng.uniform(0.2, 1.0, size=num_tones)
    norm = PEAK_AMPLITUDE / max(start.sum(), end.sum())
    return WordTemplate(
        frequencies=tuple(float(f) for f in frequencies),
        phases=tuple(float(p) for p in rng.uniform(0.0, 2 * np.pi, size=num_tones)),
        start_amplitudes=tuple(float(a) for a in start * norm),
        end_amplitudes=tuple(float(a) for a in end * norm),
        duration=float(rng.uniform(0.45, 0.7)),
        peak=float(rng.uniform(0.2, 0.6)),
        power=float(rng.uniform(0.5, 2.0)),
    )


def envelope(u: FloatArray, peak: float, power: float) -> FloatArray:
    rise = np.sin(0.5 * np.pi * np.minimum(u / peak, 1.0))
    fall = np.cos(0.5 * np.pi * np.clip((u - peak) / (1.0 - peak), 0.0, 1.0))
    return np.where(u < peak, rise, fall) ** power  # type: ignore[no-any-return]


def render(
    template: WordTemplate,
    rate: int = SYNTH_RATE,
    duration_scale: float = 1.0,
    frequency_scales: Optional[FloatArray] = None,
) -> FloatArray:
    """The voiced part of the word, without padding nor noise."""
    n = int(round(template.duration * duration_scale * rate))
    t = np.arange(n) / rate
    u = np.arange(n) / n
    scales = np.ones(template.num_tones) if frequency_scales is None else frequency_scales
    x = np.zeros(n)
    for i in range(template.num_tones):
        amplitude = template.start_amplitudes[i] + u * (
            template.end_amplitudes[i] - template.start_amplitudes[i]
        )
        x += amplitude * np.sin(
            2 * np.pi * template.frequencies[i] * scales[i] * t + template.phases[i]
        )
    return x * envelope(u, template.peak, template.power)  # type: ignore[no-any-return]


def pad(x: FloatArray, rate: int, padding: float = PADDING_S) -> FloatArray:
    silence = np.zeros(int(round(padding * rate)))
    return np.concatenate((silence, x, silence))


def synthesize_utterance(
    template: WordTemplate,
    rng: np.random.Generator,
    *,
    rate: int = SYNTH_RATE,
    jitter: float = 1.0,
    padding: float = PADDING_S,
) -> FloatArray:
    """
    One noisy, padded rendition of ``template``; ``jitter`` scales every perturbation, and
    ``jitter = 0`` yields the padded template itself.
    """
    duration_scale = 1.0 + jitter * rng.uniform(-DURATION_JITTER, DURATION_JITTER)
    frequency_scales = 1.0 + jitter * rng.uniform(
        -FREQUENCY_JITTER, FREQUENCY_JITTER, size=template.num_tones
    )
    voiced = render(template, rate, duration_scale, frequency_scales)
    x = pad(voiced, rate, padding)
    if jitter > 0:
        noise_std = np.sqrt(np.mean(voiced**2) / 10 ** (NOISE_SNR_DB / 10))
        x = x + jitter * noise_std * rng.standard_normal(x.size)
    return x  # type: ignore[no-any-return]


def class_labels(num_classes: int) -> List[str]:
    width = len(str(num_classes - 1))
    return [f"word{c:0{width}d}" for c in range(num_classes)]


def generate_synthetic_corpus(
    num_classes: int,
    samples_per_class: int,
    seed: SeedLike,
    out_dir: PathLike,
    *,
    jitter: float = 1.0,
    rate: int = SYNTH_RATE,
) -> str:
    """
    Write ``out_dir/<label>/<label>_<n>.wav`` for every class and sample, as 16-bit mono PCM.

    Labels are zero-padded so that their byte order matches the class order. The same arguments
    produce byte-identical files.
    """
    if num_classes < 2:
        raise ValueError(f"At least 2 classes are needed, got {num_classes}.")
    if samples_per_class < 2:
        raise ValueError(f"At least 2 samples per class are needed, got {samples_per_class}.")
    if jitter < 0:
        raise ValueError(f"Jitter must be non-negative, got {jitter}.")

    for class_index, label in enumerate(class_labels(num_classes)):
        template = make_template(class_index, num_classes, seed)
        log.debug("Class `%s`: tones %s Hz.", label, [round(f, 1) for f in template.frequencies])
        class_dir = os.path.join(out_dir, label)
        try:
            os.makedirs(class_dir, exist_ok=True)
        except OSError as err:
            raise IoFailure(f"Cannot create `{class_dir}`: {err}.") from err
        for sample in range(samples_per_class):
            rng = make_rng(seed, UTTERANCE_STREAM, class_index, sample)
            x = synthesize_utterance(template, rng, rate=rate, jitter=jitter)
            write_wav(os.path.join(class_dir, f"{label}_{sample:03d}.wav"), Signal(x, rate))

    log.info(
        "Wrote %d classes x %d samples to `%s`.", num_classes, samples_per_class, out_dir
    )
    return str(out_dir)

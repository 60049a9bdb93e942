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
import pytest
import soundfile as sf
from typing import Callable, Optional

from word_recognition.corpus.synthetic import generate_synthetic_corpus
from word_recognition.framework.config import FeatureConfig, RunConfig


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def feature_config() -> FeatureConfig:
    return FeatureConfig()


@pytest.fixture
def run_config() -> RunConfig:
    return RunConfig()


@pytest.fixture
def make_wav(tmp_path):
    """Write integer PCM samples to a WAV file under ``tmp_path``."""

    def _make(
        name: str,
        samples: np.ndarray,
        rate: int = 44100,
        subtype: str = "PCM_16",
        path: Optional[str] = None,
    ) -> str:
        target = path or str(tmp_path / name)
        sf.write(target, samples, rate, subtype=subtype, format="WAV")
        return target

    return _make


@pytest.fixture
def tone() -> Callable[..., np.ndarray]:
    def _tone(freq: float, num_samples: int, rate: int, amplitude: float = 0.5) -> np.ndarray:
        return amplitude * np.sin(2 * np.pi * freq * np.arange(num_samples) / rate)

    return _tone


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory) -> str:
    """Three classes with four recordings each."""
    root = tmp_path_factory.mktemp("tiny_corpus")
    return generate_synthetic_corpus(3, 4, seed=7, out_dir=str(root))

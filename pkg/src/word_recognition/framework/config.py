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
import os
from pydantic import BaseModel, ValidationError, validator
from typing import Any, Dict, Literal, Mapping, Optional, Tuple

from word_recognition.framework.errors import InvalidConfig
from word_recognition.utils.typingx import PathLike


DEFAULT_ARCHITECTURE: Tuple[int, ...] = (112, 100, 95, 90, 95, 100, 60)


class FeatureConfig(BaseModel):
    """Gather options controlling preprocessing, MFCC extraction and k-means compression."""

    # preprocessing
    sample_rate: int = 10000
    pre_emphasis_a: float = 0.9375
    vad_window_ms: float = 108.0
    vad_threshold_ratio: float = 0.01

    # framing and mfcc
    frame_len: int = 300
    frame_shift: int = 100
    num_filters: int = 40
    fft_size: int = 512
    coeff_count: int = 14

    # compression
    kmeans_k: int = 8
    kmeans_restarts: int = 10

    class Config:
        allow_mutation = False
        extra = "forbid"

    @validator("sample_rate", "frame_len", "frame_shift", "num_filters", "kmeans_k")
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be a positive integer, got {v}")
        return v

    @validator("kmeans_restarts")
    @classmethod
    def check_restarts(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"at least one k-means run is required, got {v}")
        return v

    @validator("pre_emphasis_a")
    @classmethod
    def check_pre_emphasis(cls, v: float) -> float:
        if not 0 <= v < 1:
            raise ValueError(f"pre-emphasis coefficient must lie in [0, 1), got {v}")
        return v

    @validator("vad_window_ms")
    @classmethod
    def check_vad_window(cls, v: float) -> float:
        if v <= 0:
            raise ValueError(f"VAD window must be positive, got {v} ms")
        return v

    @validator("vad_threshold_ratio")
    @classmethod
    def check_vad_threshold(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError(f"VAD threshold ratio must lie in (0, 1), got {v}")
        return v

    @validator("fft_size")
    @classmethod
    def check_fft_size(cls, v: int, values: Dict[str, Any]) -> int:
        if v < 1 or v & (v - 1) != 0:
            raise ValueError(f"FFT size must be a power of two, got {v}")
        frame_len = values.get("frame_len")
        if frame_len is not None and frame_len > v:
            raise ValueError(f"frame length {frame_len} exceeds FFT size {v}")
        return v

    @validator("coeff_count")
    @classmethod
    def check_coeff_count(cls, v: int, values: Dict[str, Any]) -> int:
        num_filters = values.get("num_filters")
        if v < 1 or (num_filters is not None and v > num_filters):
            raise ValueError(f"coefficient count must lie in [1, {num_filters}], got {v}")
        return v

    @property
    def feature_dim(self) -> int:
        return self.kmeans_k * self.coeff_count

    def with_kmeans_k(self, kmeans_k: Optional[int]) -> FeatureConfig:
        args = self.dict()
        if kmeans_k is not None:
            args["kmeans_k"] = kmeans_k
        return self.__class__(**args)


class TrainConfig(BaseModel):
    """Gather options controlling network initialization and stochastic gradient descent."""

    lr0: float = 0.05
    decay: float = 0.95
    epochs: int = 100
    max_updates: Optional[int] = None
    seed: int = 0
    init_scale_rule: Literal["fan_in", "unit"] = "fan_in"
    standardize: bool = True

    class Config:
        allow_mutation = False
        extra = "forbid"

    @validator("lr0")
    @classmethod
    def check_lr0(cls, v: float) -> float:
        if v <= 0:
            raise ValueError(f"initial learning rate must be positive, got {v}")
        return v

    @validator("decay")
    @classmethod
    def check_decay(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError(f"decay factor must lie in (0, 1], got {v}")
        return v

    @validator("epochs")
    @classmethod
    def check_epochs(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"at least one epoch is required, got {v}")
        return v

    @validator("max_updates", pre=True)
    @classmethod
    def check_max_updates(cls, v: Any) -> Optional[int]:
        if v is None or (isinstance(v, str) and v.strip().lower() in ("", "none")):
            return None
        if int(v) < 1:
            raise ValueError(f"update cap must be positive, got {v}")
        return int(v)

    @validator("seed")
    @classmethod
    def check_seed(cls, v: int) -> int:
        if v < 0:
            raise ValueError(f"seed must be non-negative, got {v}")
        return v

    def with_epochs(self, epochs: Optional[int]) -> TrainConfig:
        args = self.dict()
        if epochs is not None:
            args["epochs"] = epochs
        return self.__class__(**args)

    def with_seed(self, seed: Optional[int]) -> TrainConfig:
        args = self.dict()
        if seed is not None:
            args["seed"] = seed
        return self.__class__(**args)


class RunConfig(FeatureConfig, TrainConfig):
    """
    Flat configuration of a whole run, as read from a configuration file.

    The defaults are 10 kHz audio, pre-emphasis 0.9375, 300/100-sample frames, 40 mel filters,
    14 coefficients, K = 8, architecture (112, 100, 95, 90, 95, 100, 60) and a learning rate of
    0.05 decayed by 0.95 per epoch.
    """

    architecture: Tuple[int, ...] = DEFAULT_ARCHITECTURE
    train_fraction: float = 2 / 3
    num_workers: int = -1
    strict: bool = False

    @validator("architecture", pre=True)
    @classmethod
    def parse_architecture(cls, v: Any) -> Tuple[int, ...]:
        if isinstance(v, str):
            v = tuple(int(size) for size in v.replace("(", "").replace(")", "").split(","))
        v = tuple(v)
        if len(v) < 2 or any(int(size) < 1 for size in v):
            raise ValueError(f"architecture needs at least two positive layer sizes, got {v}")
        return v

    @validator("train_fraction")
    @classmethod
    def check_train_fraction(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError(f"train fraction must lie in (0, 1), got {v}")
        return v

    @validator("num_workers", always=True)
    @classmethod
    def set_num_workers(cls, v: int) -> int:
        if v <= 0:
            return int(os.environ.get("OMP_NUM_THREADS", 1))
        else:
            return v

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(**{name: getattr(self, name) for name in FeatureConfig.__fields__})

    def train_config(self) -> TrainConfig:
        return TrainConfig(**{name: getattr(self, name) for name in TrainConfig.__fields__})

    def resolve_architecture(self, num_classes: int) -> Tuple[int, ...]:
        """Check the configured architecture against the feature and label dimensions."""
        if self.architecture[0] != self.feature_dim:
            raise InvalidConfig(
                f"architecture input size {self.architecture[0]} does not match the feature "
                f"dimension {self.kmeans_k} x {self.coeff_count} = {self.feature_dim}"
            )
        if self.architecture[-1] != num_classes:
            raise InvalidConfig(
                f"architecture output size {self.architecture[-1]} does not match the number "
                f"of classes {num_classes}"
            )
        return self.architecture

    def with_overrides(self, overrides: Mapping[str, Any]) -> RunConfig:
        unknown = sorted(set(overrides) - set(RunConfig.__fields__))
        if unknown:
            raise InvalidConfig(f"Unknown configuration key(s): {', '.join(unknown)}.")
        args = self.dict()
        args.update(overrides)
        return _build(args)

    def with_strict(self, strict: bool) -> RunConfig:
        return self.with_overrides({"strict": strict}) if strict else self

    def to_text(self) -> str:
        """Render the configuration in the ``key = value`` file format."""
        lines = []
        for name in RunConfig.__fields__:
            lines.append(f"{name} = {_format_value(getattr(self, name))}")
        return "\n".join(lines) + "\n"


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(str(item) for item in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _build(args: Mapping[str, Any]) -> RunConfig:
    try:
        return RunConfig(**args)
    except ValidationError as err:
        raise InvalidConfig(str(err)) from err


def parse_config_text(text: str) -> RunConfig:
    """Parse the flat ``key = value`` configuration format; ``#`` starts a comment."""
    args: Dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", maxsplit=1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"Line {lineno}: expected `key = value`, got `{raw_line}`.")
        key, value = (item.strip() for item in line.split("=", maxsplit=1))
        if key not in RunConfig.__fields__:
            raise InvalidConfig(f"Line {lineno}: unknown configuration key `{key}`.")
        if key in args:
            raise InvalidConfig(f"Line {lineno}: duplicate configuration key `{key}`.")
        args[key] = value
    return _build(args)


def load_run_config(path: Optional[PathLike]) -> RunConfig:
    """Load a configuration file, or the defaults when ``path`` is None."""
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as config_file:
            text = config_file.read()
    except OSError as err:
        raise InvalidConfig(f"Cannot read configuration file `{path}`: {err}.") from err
    return parse_config_text(text)

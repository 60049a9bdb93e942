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
JSON model files.

A model file holds ``format_version``, ``architecture``, one ``{"weights", "biases"}`` record
per layer, and the metadata needed to run the same feature pipeline at inference time:
``feature_config``, ``label_table``, ``seed`` and the optional ``input_scaling``.
"""

from __future__ import annotations
from dataclasses import dataclass
import json
import numpy as np
from pydantic import BaseModel, ValidationError
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

from word_recognition.framework.config import FeatureConfig
from word_recognition.framework.errors import IoFailure, SchemaMismatch, ShapeMismatch
from word_recognition.network.model import Network
from word_recognition.network.scaling import FeatureScaler

if TYPE_CHECKING:
    from collections.abc import Sequence

    from word_recognition.utils.typingx import PathLike


FORMAT_VERSION: int = 1


class LayerRecord(BaseModel):
    weights: List[List[float]]
    biases: List[float]


class InputScalingRecord(BaseModel):
    mean: List[float]
    scale: List[float]


class ModelFile(BaseModel):
    format_version: int
    architecture: List[int]
    layers: List[LayerRecord]
    feature_config: Dict[str, Any] = {}
    label_table: List[str] = []
    seed: Optional[int] = None
    input_scaling: Optional[InputScalingRecord] = None


@dataclass(frozen=True, eq=False)
class LoadedModel:
    network: Network
    feature_config: Optional[FeatureConfig]
    label_table: Tuple[str, ...]
    seed: Optional[int]
    scaler: Optional[FeatureScaler]


def _dump_feature_config(config: FeatureConfig) -> Dict[str, Any]:
    args = config.dict()
    return {"k": args.pop("kmeans_k"), "coeff_count": args.pop("coeff_count"), **args}


def _load_feature_config(args: Dict[str, Any]) -> Optional[FeatureConfig]:
    if not args:
        return None
    args = dict(args)
    if "k" in args:
        args["kmeans_k"] = args.pop("k")
    try:
        return FeatureConfig(**args)
    except ValidationError as err:
        raise SchemaMismatch(f"Invalid feature configuration in model file: {err}") from err


def save_model(
    net: Network,
    path: PathLike,
    *,
    feature_config: Optional[FeatureConfig] = None,
    label_table: Sequence[str] = (),
    seed: Optional[int] = None,
    scaler: Optional[FeatureScaler] = None,
) -> None:
    """Write ``net`` and its metadata; floats keep their full round-trip representation."""
    document = ModelFile(
        format_version=FORMAT_VERSION,
        architecture=list(net.architecture.layer_sizes),
        layers=[
            LayerRecord(weights=w.tolist(), biases=b.tolist())
            for w, b in zip(net.weights, net.biases)
        ],
        feature_config=(
            _dump_feature_config(feature_config) if feature_config is not None else {}
        ),
        label_table=list(label_table),
        seed=seed,
        input_scaling=(
            InputScalingRecord(mean=scaler.mean.tolist(), scale=scaler.scale.tolist())
            if scaler is not None
            else None
        ),
    )
    try:
        with open(path, "w", encoding="utf-8") as model_file:
            model_file.write(document.json())
            model_file.write("\n")
    except OSError as err:
        raise IoFailure(f"Cannot write model file `{path}`: {err}.") from err


def _check_shapes(document: ModelFile) -> None:
    arch = document.architecture
    if len(arch) < 2 or any(size < 1 for size in arch):
        raise ShapeMismatch(f"Invalid architecture {arch}.")
    if len(document.layers) != len(arch) - 1:
        raise ShapeMismatch(
            f"Architecture {arch} declares {len(arch) - 1} layers, file holds "
            f"{len(document.layers)}."
        )
    for layer, (record, fan_in, fan_out) in enumerate(zip(document.layers, arch, arch[1:])):
        if len(record.weights) != fan_out or any(len(row) != fan_in for row in record.weights):
            raise ShapeMismatch(
                f"Layer {layer}: weights do not form a {fan_out} x {fan_in} matrix."
            )
        if len(record.biases) != fan_out:
            raise ShapeMismatch(
                f"Layer {layer}: expected {fan_out} biases, got {len(record.biases)}."
            )
    scaling = document.input_scaling
    if scaling is not None and not len(scaling.mean) == len(scaling.scale) == arch[0]:
        raise ShapeMismatch(f"Input scaling does not match the input size {arch[0]}.")


def load_model_file(path: PathLike) -> LoadedModel:
    """Read a model file together with its metadata."""
    try:
        with open(path, "r", encoding="utf-8") as model_file:
            raw = json.load(model_file)
    except json.JSONDecodeError as err:
        raise SchemaMismatch(f"`{path}` is not valid JSON: {err}.") from err
    except OSError as err:
        raise IoFailure(f"Cannot read model file `{path}`: {err}.") from err

    if not isinstance(raw, dict) or raw.get("format_version") != FORMAT_VERSION:
        version = raw.get("format_version") if isinstance(raw, dict) else None
        raise SchemaMismatch(
            f"`{path}` has format version {version!r}; expected {FORMAT_VERSION}."
        )
    try:
        document = ModelFile.parse_obj(raw)
    except ValidationError as err:
        raise SchemaMismatch(f"`{path}` does not follow the model schema: {err}") from err
    _check_shapes(document)

    net = Network(
        tuple(np.array(record.weights, dtype=np.float64) for record in document.layers),
        tuple(np.array(record.biases, dtype=np.float64) for record in document.layers),
    )
    scaler = (
        FeatureScaler(
            np.array(document.input_scaling.mean), np.array(document.input_scaling.scale)
        )
        if document.input_scaling is not None
        else None
    )
    return LoadedModel(
        network=net,
        feature_config=_load_feature_config(document.feature_config),
        label_table=tuple(document.label_table),
        seed=document.seed,
        scaler=scaler,
    )


def load_model(path: PathLike) -> Network:
    return load_model_file(path).network

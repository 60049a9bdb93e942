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

"""Fully connected feed-forward network with sigmoid units and a squared-error cost."""

from __future__ import annotations
from dataclasses import dataclass
import numpy as np
from scipy.special import expit
from typing import TYPE_CHECKING, Dict, List, NamedTuple, Tuple

from word_recognition.framework.errors import DimensionMismatch
from word_recognition.framework.seeding import make_rng
from word_recognition.network.architecture import Architecture, param_count

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence
    from typing import Literal

    from word_recognition.utils.typingx import ArrayLike, FloatArray, SeedLike


BIAS_INIT_STD: float = 0.01


def _frozen_copies(arrays: Sequence[ArrayLike]) -> Tuple[FloatArray, ...]:
    out = []
    for array in arrays:
        copy = np.array(array, dtype=np.float64)
        copy.flags.writeable = False
        out.append(copy)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Network:
    """
    Weights and biases of every layer. Layer ``l`` maps ``in_l`` inputs to ``out_l`` outputs
    through an ``out_l x in_l`` weight matrix. Parameters are read-only once constructed.
    """

    weights: Tuple[FloatArray, ...]
    biases: Tuple[FloatArray, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen_copies(self.weights))
        object.__setattr__(self, "biases", _frozen_copies(self.biases))
        if len(self.weights) == 0 or len(self.weights) != len(self.biases):
            raise ValueError("A network needs as many bias vectors as weight matrices (>= 1).")
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(
                    f"Layer {layer}: weights {w.shape} and biases {b.shape} are inconsistent."
                )
            if layer > 0 and w.shape[1] != self.weights[layer - 1].shape[0]:
                raise ValueError(
                    f"Layer {layer} expects {w.shape[1]} inputs but layer {layer - 1} "
                    f"produces {self.weights[layer - 1].shape[0]}."
                )

    @property
    def architecture(self) -> Architecture:
        return Architecture((self.weights[0].shape[1], *(w.shape[0] for w in self.weights)))

    @property
    def num_parameters(self) -> int:
        return param_count(self.architecture)

    def parameters(self) -> Iterator[FloatArray]:
        for w, b in zip(self.weights, self.biases):
            yield w
            yield b


@dataclass(frozen=True, eq=False)
class Gradients:
    """Derivatives of the loss, shaped like the parameters of a ``Network``."""

    weights: Tuple[FloatArray, ...]
    biases: Tuple[FloatArray, ...]

    def as_dict(self) -> Dict[str, FloatArray]:
        out = {}
        for layer, (w, b) in enumerate(zip(self.weights, self.biases), start=1):
            out[f"W{layer}"] = w
            out[f"b{layer}"] = b
        return out


class Prediction(NamedTuple):
    label_index: int
    scores: FloatArray


def init_network(
    arch: Architecture, seed: SeedLike = 0, scale_rule: Literal["fan_in", "unit"] = "fan_in"
) -> Network:
    """
    Gaussian initialization: weights with standard deviation ``1 / sqrt(fan_in)`` (or 1 with
    ``scale_rule="unit"``), biases with standard deviation 0.01.
    """
    if scale_rule not in ("fan_in", "unit"):
        raise ValueError(f"Unknown initialization rule `{scale_rule}`.")
    rng = make_rng(seed)
    weights, biases = [], []
    for fan_out, fan_in in arch.weight_shapes:
        std = 1.0 / np.sqrt(fan_in) if scale_rule == "fan_in" else 1.0
        weights.append(rng.normal(0.0, std, size=(fan_out, fan_in)))
        biases.append(rng.normal(0.0, BIAS_INIT_STD, size=fan_out))
    return Network(tuple(weights), tuple(biases))


def one_hot(label_index: int, num_classes: int) -> FloatArray:
    if not 0 <= label_index < num_classes:
        raise DimensionMismatch(f"Class index {label_index} outside [0, {num_classes}).")
    target = np.zeros(num_classes)
    target[label_index] = 1.0
    return target


def _check_input(net: Network, x: ArrayLike) -> FloatArray:
    x = np.asarray(x, dtype=np.float64)
    expected = net.weights[0].shape[1]
    if x.shape != (expected,):
        raise DimensionMismatch(f"Network expects an input of length {expected}, got {x.shape}.")
    return x


def propagate(
    weights: Sequence[FloatArray], biases: Sequence[FloatArray], x: FloatArray
) -> List[FloatArray]:
    """Activations of every layer, input included; works row-wise on a batch as well."""
    activations = [x]
    for w, b in zip(weights, biases):
        activations.append(expit(activations[-1] @ w.T + b))
    return activations


def forward(net: Network, x: ArrayLike) -> List[FloatArray]:
    """``a_0 = x``, ``a_l = sigmoid(W_l a_(l-1) + b_l)``; returns ``[a_0, ..., a_L]``."""
    return propagate(net.weights, net.biases, _check_input(net, x))


def loss(output: ArrayLike, target: ArrayLike) -> float:
    """Squared Euclidean distance between output and target (no 1/2 factor)."""
    o = np.asarray(output, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if o.shape != t.shape:
        raise DimensionMismatch(f"Output shape {o.shape} differs from target shape {t.shape}.")
    return float(np.sum((o - t) ** 2))


def backpropagate(
    weights: Sequence[FloatArray], activations: Sequence[FloatArray], target: FloatArray
) -> Tuple[List[FloatArray], List[FloatArray]]:
    """Weight and bias gradients given the activations of a forward pass."""
    num_layers = len(weights)
    grad_w: List[FloatArray] = [np.empty(0)] * num_layers
    grad_b: List[FloatArray] = [np.empty(0)] * num_layers
    out = activations[-1]
    delta = 2.0 * (out - target) * out * (1.0 - out)
    for layer in reversed(range(num_layers)):
        grad_w[layer] = np.outer(delta, activations[layer])
        grad_b[layer] = delta
        if layer > 0:
            a = activations[layer]
            delta = (weights[layer].T @ delta) * a * (1.0 - a)
    return grad_w, grad_b


def backprop(net: Network, x: ArrayLike, target: ArrayLike) -> Gradients:
    """Exact gradient of :func:`loss` with respect to every weight and bias."""
    activations = forward(net, x)
    t = np.asarray(target, dtype=np.float64)
    if t.shape != activations[-1].shape:
        raise DimensionMismatch(
            f"Target shape {t.shape} differs from output shape {activations[-1].shape}."
        )
    grad_w, grad_b = backpropagate(net.weights, activations, t)
    return Gradients(tuple(grad_w), tuple(grad_b))


def predict(net: Network, x: ArrayLike) -> Prediction:
    """Index of the largest output activation (lowest index on ties) and all activations."""
    scores = forward(net, x)[-1]
    return Prediction(int(np.argmax(scores)), scores)

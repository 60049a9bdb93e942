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

"""Comparison of backpropagation against central finite differences."""

from __future__ import annotations
from dataclasses import dataclass
import numpy as np
from typing import TYPE_CHECKING, List, Optional, Tuple

from word_recognition.network.model import Gradients, backprop
from word_recognition.utils.validation import relative_error

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from word_recognition.network.model import Network
    from word_recognition.utils.typingx import ArrayLike, FloatArray


@dataclass(frozen=True)
class ParameterCoordinate:
    sample: int
    layer: int
    kind: str
    index: Tuple[int, ...]

    def __str__(self) -> str:
        name = "W" if self.kind == "weights" else "b"
        index = ", ".join(str(i) for i in self.index)
        return f"{name}{self.layer + 1}[{index}] (sample {self.sample})"


@dataclass(frozen=True, eq=False)
class GradCheckResult:
    max_relative_error: float
    worst: Optional[ParameterCoordinate]
    analytic: Tuple[Gradients, ...]
    numeric: Tuple[Gradients, ...]

    def passed(self, tolerance: float = 1e-6) -> bool:
        return self.max_relative_error < tolerance


def _sigmoid(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


def _loss_from_layer(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    start: int,
    a: np.ndarray,
    target: np.ndarray,
) -> np.ndarray:
    for w, b in zip(weights[start:], biases[start:]):
        a = _sigmoid(w @ a + b)
    return np.sum((a - target) ** 2)


def numeric_gradients(net: Network, x: ArrayLike, target: ArrayLike, eps: float) -> Gradients:
    """
    Central differences ``(L(theta + eps) - L(theta - eps)) / (2 eps)`` for every parameter.

    The loss is evaluated in extended precision; layers upstream of the perturbed one are
    computed once.
    """
    dtype = np.longdouble
    weights = [w.astype(dtype) for w in net.weights]
    biases = [b.astype(dtype) for b in net.biases]
    t = np.asarray(target, dtype=dtype)
    inputs = [np.asarray(x, dtype=dtype)]
    for w, b in zip(weights[:-1], biases[:-1]):
        inputs.append(_sigmoid(w @ inputs[-1] + b))

    grad_w: List[FloatArray] = []
    grad_b: List[FloatArray] = []
    for layer in range(len(weights)):
        for params, grads in ((weights[layer], grad_w), (biases[layer], grad_b)):
            grad = np.empty(params.shape, dtype=np.float64)
            for index in np.ndindex(*params.shape):
                original = params[index]
                params[index] = original + eps
                loss_plus = _loss_from_layer(weights, biases, layer, inputs[layer], t)
                params[index] = original - eps
                loss_minus = _loss_from_layer(weights, biases, layer, inputs[layer], t)
                params[index] = original
                grad[index] = (loss_plus - loss_minus) / (2 * eps)
            grads.append(grad)
    return Gradients(tuple(grad_w), tuple(grad_b))


def grad_check(
    net: Network,
    samples: Sequence[Tuple[ArrayLike, ArrayLike]],
    eps: float = 1e-5,
    gradient: Callable[[Network, ArrayLike, ArrayLike], Gradients] = backprop,
) -> GradCheckResult:
    """
    Largest relative discrepancy ``|g_bp - g_fd| / max(|g_bp|, |g_fd|, 1e-8)`` between the
    analytic gradient (``gradient``, backpropagation by default) and finite differences, over
    every parameter and sample.
    """
    if eps <= 0:
        raise ValueError(f"Finite-difference step must be positive, got {eps}.")

    worst_error = 0.0
    worst: Optional[ParameterCoordinate] = None
    analytic, numeric = [], []
    for sample, (x, target) in enumerate(samples):
        g_bp = gradient(net, x, target)
        g_fd = numeric_gradients(net, x, target, eps)
        analytic.append(g_bp)
        numeric.append(g_fd)
        for kind in ("weights", "biases"):
            for layer, (bp, fd) in enumerate(zip(getattr(g_bp, kind), getattr(g_fd, kind))):
                errors = relative_error(bp, fd)
                if errors.size == 0:
                    continue
                flat = int(np.argmax(errors))
                if worst is None or errors.flat[flat] > worst_error:
                    worst_error = float(errors.flat[flat])
                    index = tuple(int(i) for i in np.unravel_index(flat, errors.shape))
                    worst = ParameterCoordinate(sample, layer, kind, index)
    return GradCheckResult(worst_error, worst, tuple(analytic), tuple(numeric))

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

from word_recognition.network.architecture import Architecture
from word_recognition.network.gradcheck import ParameterCoordinate, grad_check
from word_recognition.network.model import Gradients, Network, backprop, init_network, one_hot


def random_samples(rng: np.random.Generator, arch: Architecture, count: int = 5):
    return [
        (
            rng.standard_normal(arch.input_size),
            one_hot(int(rng.integers(arch.output_size)), arch.output_size),
        )
        for _ in range(count)
    ]


def flipped_output_bias(net: Network, x, target) -> Gradients:
    grads = backprop(net, x, target)
    biases = list(grads.biases)
    biases[-1] = -biases[-1]
    return Gradients(grads.weights, tuple(biases))


def doubled_first_weight(net: Network, x, target) -> Gradients:
    grads = backprop(net, x, target)
    weights = [w.copy() for w in grads.weights]
    weights[-1][0, 0] *= 2
    return Gradients(tuple(weights), grads.biases)


@pytest.mark.parametrize("sizes", [(5, 4, 3), (112, 20, 60)])
def test_backprop_matches_finite_differences(rng, sizes):
    arch = Architecture(sizes)
    result = grad_check(init_network(arch, seed=3), random_samples(rng, arch), eps=1e-5)
    assert result.passed()
    assert result.max_relative_error < 1e-6
    assert len(result.analytic) == len(result.numeric) == 5


@pytest.mark.parametrize("eps", [1e-4, 1e-5, 1e-6])
def test_step_sweep(rng, eps):
    # positive weights and zero targets keep every gradient away from zero
    arch = Architecture((5, 4, 3))
    net = init_network(arch, seed=8)
    net = Network(tuple(np.abs(w) for w in net.weights), net.biases)
    samples = [(rng.uniform(0.5, 1.5, size=5), np.zeros(3)) for _ in range(5)]
    assert grad_check(net, samples, eps=eps).passed()


def test_zero_network():
    net = Network((np.zeros((4, 5)), np.zeros((3, 4))), (np.zeros(4), np.zeros(3)))
    result = grad_check(net, [(np.zeros(5), one_hot(1, 3))])
    assert result.max_relative_error < 1e-9


@pytest.mark.parametrize("gradient", [flipped_output_bias, doubled_first_weight])
def test_corrupted_gradient_is_caught(rng, gradient):
    arch = Architecture((5, 4, 3))
    result = grad_check(init_network(arch, seed=3), random_samples(rng, arch), gradient=gradient)
    assert result.max_relative_error > 0.1
    assert not result.passed()
    assert result.worst is not None
    assert result.worst.layer == 1


def test_worst_coordinate_label():
    coordinate = ParameterCoordinate(sample=2, layer=0, kind="weights", index=(3, 1))
    assert str(coordinate) == "W1[3, 1] (sample 2)"
    assert str(ParameterCoordinate(0, 1, "biases", (2,))) == "b2[2] (sample 0)"


def test_invalid_step():
    net = init_network(Architecture((2, 2)))
    with pytest.raises(ValueError):
        grad_check(net, [(np.zeros(2), one_hot(0, 2))], eps=0.0)

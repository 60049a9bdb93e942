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
from scipy.special import logit

from word_recognition.framework.config import TrainConfig
from word_recognition.framework.errors import (
    DimensionMismatch,
    EmptyTrainingSet,
    NumericalInstability,
)
from word_recognition.network.architecture import (
    HIDDEN_LAYER_VARIANTS,
    DEFAULT_HIDDEN_LAYERS,
    Architecture,
    param_count,
    variants,
)
from word_recognition.network.model import (
    Network,
    backprop,
    forward,
    init_network,
    loss,
    one_hot,
    predict,
)
from word_recognition.network.scaling import FeatureScaler
from word_recognition.network.training import learning_rate, sgd_step, sgd_train


def constant_network(outputs) -> Network:
    """A one-layer network ignoring its single input and producing ``outputs``."""
    outputs = np.asarray(outputs, dtype=float)
    return Network((np.zeros((outputs.size, 1)),), (logit(outputs),))


def blobs(rng: np.random.Generator, n: int = 20):
    x = np.concatenate((rng.normal(-2, 0.5, (n, 2)), rng.normal(2, 0.5, (n, 2))))
    y = np.repeat([0, 1], n)
    return x, y


class TestArchitecture:
    @pytest.mark.parametrize(
        "sizes, expected",
        [((112, 100, 95, 90, 95, 100, 60), 53840), ((2, 3, 2), 17), ((112, 60), 6780)],
    )
    def test_param_count(self, sizes, expected):
        assert param_count(Architecture(sizes)) == expected

    def test_default_network(self):
        arch = Architecture.from_hidden(112, DEFAULT_HIDDEN_LAYERS, 60)
        assert arch.layer_sizes == (112, 100, 95, 90, 95, 100, 60)
        assert arch.num_layers == 6
        assert arch.weight_shapes[0] == (100, 112)
        assert str(arch) == "(112, 100, 95, 90, 95, 100, 60)"

    def test_variants(self):
        for family, hidden in HIDDEN_LAYER_VARIANTS.items():
            archs = variants(family, 112, 60)
            assert [a.layer_sizes[1:-1] for a in archs] == list(hidden)
            assert all(a.input_size == 112 and a.output_size == 60 for a in archs)

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="network7"):
            variants("network7", 112, 60)

    @pytest.mark.parametrize("sizes", [(112,), (112, 0, 60)])
    def test_invalid(self, sizes):
        with pytest.raises(ValueError):
            Architecture(sizes)


class TestModel:
    def test_init_deterministic(self):
        arch = Architecture((112, 20, 10))
        a, b = init_network(arch, seed=4), init_network(arch, seed=4)
        for p, q in zip(a.parameters(), b.parameters()):
            np.testing.assert_array_equal(p, q)
        assert a.num_parameters == param_count(arch)
        assert a.architecture == arch

    def test_init_scale(self):
        net = init_network(Architecture((400, 300)), seed=0)
        assert np.std(net.weights[0]) == pytest.approx(1 / 20, rel=0.02)
        unit = init_network(Architecture((400, 300)), seed=0, scale_rule="unit")
        assert np.std(unit.weights[0]) == pytest.approx(1.0, rel=0.02)

    def test_parameters_are_read_only(self):
        net = init_network(Architecture((3, 2)))
        with pytest.raises(ValueError):
            net.weights[0][0, 0] = 1.0

    def test_zero_network(self):
        net = Network((np.zeros((4, 3)), np.zeros((2, 4))), (np.zeros(4), np.zeros(2)))
        for a in forward(net, np.ones(3))[1:]:
            np.testing.assert_array_equal(a, 0.5)

    def test_single_unit(self):
        net = Network((np.ones((1, 1)),), (np.zeros(1),))
        np.testing.assert_array_equal(forward(net, [0.0])[-1], [0.5])

    def test_output_range(self, rng):
        net = init_network(Architecture((10, 8, 5)), seed=1)
        out = forward(net, rng.standard_normal(10) * 3)[-1]
        assert np.all((out > 0) & (out < 1))

    def test_input_dimension(self):
        with pytest.raises(DimensionMismatch):
            forward(init_network(Architecture((3, 2))), np.zeros(4))

    def test_inconsistent_layers(self):
        with pytest.raises(ValueError):
            Network((np.zeros((4, 3)), np.zeros((2, 5))), (np.zeros(4), np.zeros(2)))

    def test_loss(self):
        assert loss([0.2, 0.7], [0.2, 0.7]) == 0.0
        assert loss([0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.5)
        with pytest.raises(DimensionMismatch):
            loss([0.5], [1.0, 0.0])

    def test_one_hot(self):
        np.testing.assert_array_equal(one_hot(2, 4), [0.0, 0.0, 1.0, 0.0])
        with pytest.raises(ValueError):
            one_hot(4, 4)

    def test_gradient_vanishes_at_target(self, rng):
        net = init_network(Architecture((4, 3, 2)), seed=2)
        x = rng.standard_normal(4)
        grads = backprop(net, x, forward(net, x)[-1])
        for g in (*grads.weights, *grads.biases):
            np.testing.assert_array_equal(g, 0.0)

    def test_hand_gradient(self):
        net = Network((np.zeros((1, 1)),), (np.zeros(1),))
        assert forward(net, [1.0])[-1][0] == 0.5
        grads = backprop(net, [1.0], [1.0])
        np.testing.assert_array_equal(grads.biases[0], [-0.25])
        np.testing.assert_array_equal(grads.weights[0], [[-0.25]])

    def test_gradient_shapes(self, rng):
        net = init_network(Architecture((4, 3, 2)), seed=2)
        grads = backprop(net, rng.standard_normal(4), one_hot(1, 2))
        assert [g.shape for g in grads.weights] == [(3, 4), (2, 3)]
        assert sorted(grads.as_dict()) == ["W1", "W2", "b1", "b2"]

    def test_predict(self):
        assert predict(constant_network([0.1, 0.9, 0.3]), [0.0]).label_index == 1
        assert predict(constant_network([0.5, 0.5]), [0.0]).label_index == 0


class TestTraining:
    def test_learning_rate(self):
        assert learning_rate(0.05, 0.95, 0) == 0.05
        assert learning_rate(0.05, 0.95, 2) == pytest.approx(0.045125)

    def test_step_reduces_loss(self, rng):
        net = init_network(Architecture((5, 4, 3)), seed=3)
        x, t = rng.standard_normal(5), one_hot(0, 3)
        before = loss(forward(net, x)[-1], t)
        after = loss(forward(sgd_step(net, x, t, 0.1), x)[-1], t)
        assert after < before

    def test_hand_step(self):
        net = Network((np.zeros((1, 1)),), (np.zeros(1),))
        stepped = sgd_step(net, [1.0], [1.0], 0.05)
        assert stepped.weights[0][0, 0] == pytest.approx(0.0125)
        assert stepped.biases[0][0] == pytest.approx(0.0125)
        assert net.weights[0][0, 0] == 0.0

    def test_small_steps_never_increase_loss(self, rng):
        for trial in range(100):
            arch = Architecture(tuple(int(n) for n in rng.integers(1, 8, size=3)))
            net = init_network(arch, seed=trial)
            x = rng.standard_normal(arch.input_size)
            t = one_hot(int(rng.integers(arch.output_size)), arch.output_size)
            lr = float(rng.uniform(1e-5, 1e-3))
            before = loss(forward(net, x)[-1], t)
            after = loss(forward(sgd_step(net, x, t, lr), x)[-1], t)
            assert after <= before

    def test_epochs_are_permutations(self, monkeypatch):
        visited = []
        monkeypatch.setattr(
            "word_recognition.network.training._update",
            lambda weights, biases, x, target, lr: visited.append(int(x[0])),
        )
        x = np.column_stack((np.arange(7.0), np.zeros(7)))
        y = np.arange(7) % 2
        cfg = TrainConfig(epochs=4, seed=5)
        sgd_train(init_network(Architecture((2, 3, 2))), x, y, cfg)
        epochs = [visited[i : i + 7] for i in range(0, 28, 7)]
        assert len(visited) == 28
        for order in epochs:
            assert sorted(order) == list(range(7))
        assert len({tuple(order) for order in epochs}) > 1

    def test_learns_separable_data(self, rng):
        x, y = blobs(rng)
        cfg = TrainConfig(lr0=0.5, decay=1.0, epochs=50)
        result = sgd_train(init_network(Architecture((2, 4, 2)), seed=0), x, y, cfg)
        assert result.history[-1].train_accuracy >= 0.95
        assert result.history[-1].mean_loss < result.history[0].mean_loss

    def test_history(self, rng):
        x, y = blobs(rng, 5)
        cfg = TrainConfig(lr0=0.05, decay=0.95, epochs=4)
        seen = []
        result = sgd_train(init_network(Architecture((2, 3, 2))), x, y, cfg, progress=seen.append)
        assert [r.epoch for r in result.history] == [1, 2, 3, 4]
        assert [r.updates for r in result.history] == [10, 20, 30, 40]
        assert result.history[2].lr == pytest.approx(0.045125)
        assert list(result.history) == seen

    def test_update_cap(self, rng):
        x, y = blobs(rng, 5)
        cfg = TrainConfig(epochs=10, max_updates=25)
        result = sgd_train(init_network(Architecture((2, 3, 2))), x, y, cfg)
        assert len(result.history) == 3
        assert result.history[-1].updates == 25

    def test_deterministic(self, rng):
        x, y = blobs(rng, 10)
        cfg = TrainConfig(epochs=5, seed=9)
        net = init_network(Architecture((2, 6, 2)), seed=9)
        a, b = sgd_train(net, x, y, cfg), sgd_train(net, x, y, cfg)
        for p, q in zip(a.network.parameters(), b.network.parameters()):
            np.testing.assert_array_equal(p, q)

    def test_does_not_modify_input_network(self, rng):
        x, y = blobs(rng, 5)
        net = init_network(Architecture((2, 3, 2)))
        w0 = net.weights[0].copy()
        sgd_train(net, x, y, TrainConfig(epochs=2))
        np.testing.assert_array_equal(net.weights[0], w0)

    def test_invalid_inputs(self):
        net = init_network(Architecture((2, 3, 2)))
        cfg = TrainConfig(epochs=1)
        with pytest.raises(EmptyTrainingSet):
            sgd_train(net, np.zeros((0, 2)), np.zeros(0, dtype=int), cfg)
        with pytest.raises(DimensionMismatch):
            sgd_train(net, np.zeros((4, 3)), np.zeros(4, dtype=int), cfg)
        with pytest.raises(DimensionMismatch):
            sgd_train(net, np.zeros((4, 2)), np.full(4, 2), cfg)

    def test_non_finite_parameters(self):
        x = np.array([[np.nan, 0.0], [0.0, 1.0]])
        cfg = TrainConfig(epochs=1)
        with pytest.raises(NumericalInstability):
            sgd_train(init_network(Architecture((2, 2))), x, np.array([0, 1]), cfg)


class TestScaling:
    def test_standardizes(self, rng):
        x = rng.normal(5.0, 3.0, size=(50, 4))
        z = FeatureScaler.fit(x).transform(x)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(z.std(axis=0), 1.0)

    def test_constant_dimension(self):
        x = np.column_stack((np.arange(4.0), np.full(4, 7.0)))
        scaler = FeatureScaler.fit(x)
        assert scaler.scale[1] == 1.0
        np.testing.assert_array_equal(scaler.transform(x)[:, 1], 0.0)

    def test_identity(self, rng):
        x = rng.standard_normal((3, 5))
        np.testing.assert_array_equal(FeatureScaler.identity(5).transform(x), x)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            FeatureScaler.identity(3).transform(np.zeros(4))

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
from typing import TYPE_CHECKING, Dict, List, Tuple

if TYPE_CHECKING:
    from collections.abc import Sequence


DEFAULT_HIDDEN_LAYERS: Tuple[int, ...] = (100, 95, 90, 95, 100)

# Hidden-layer configurations to compare, grouped by depth.
HIDDEN_LAYER_VARIANTS: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    "network1": ((25,), (35,), (45,), (55,), (65,), (70,)),
    "network2": ((45, 35), (45, 45), (45, 55), (50, 45), (55, 45)),
    "network3": ((40, 40, 40), (50, 55, 50)),
    "network4": (
        (45, 25, 25, 45),
        (45, 45, 45, 45),
        (60, 70, 80, 30),
        (75, 45, 80, 50),
        (45, 35, 35, 45),
        (50, 40, 80, 100),
        (65, 55, 45, 35),
        (80, 50, 70, 60),
        (90, 90, 90, 90),
        (100, 100, 100, 100),
    ),
    "network5": (
        (85, 85, 90, 85, 85),
        (75, 85, 90, 85, 85),
        (85, 85, 90, 85, 95),
        (75, 85, 90, 105, 115),
        (90, 90, 90, 90, 90),
        (85, 85, 86, 85, 85),
        (65, 65, 70, 70, 90),
        (85, 90, 85, 90, 90),
        (85, 85, 85, 85, 85),
        DEFAULT_HIDDEN_LAYERS,
    ),
    "network6": ((85, 85, 90, 85, 85, 85),),
}


@dataclass(frozen=True)
class Architecture:
    """Layer sizes of a fully connected network: input, hidden layers, output."""

    layer_sizes: Tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(size) for size in self.layer_sizes)
        if len(sizes) < 2:
            raise ValueError(f"An architecture needs at least two layers, got {sizes}.")
        if any(size < 1 for size in sizes):
            raise ValueError(f"Layer sizes must be positive, got {sizes}.")
        object.__setattr__(self, "layer_sizes", sizes)

    @classmethod
    def from_hidden(
        cls, input_size: int, hidden: Sequence[int], output_size: int
    ) -> Architecture:
        return cls((input_size, *hidden, output_size))

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    @property
    def num_layers(self) -> int:
        """Number of weight layers."""
        return len(self.layer_sizes) - 1

    @property
    def weight_shapes(self) -> List[Tuple[int, int]]:
        return [
            (fan_out, fan_in) for fan_in, fan_out in zip(self.layer_sizes, self.layer_sizes[1:])
        ]

    def __str__(self) -> str:
        return "(" + ", ".join(str(size) for size in self.layer_sizes) + ")"


def param_count(arch: Architecture) -> int:
    """Total number of weights and biases."""
    return sum(fan_out * fan_in + fan_out for fan_out, fan_in in arch.weight_shapes)


def variants(family: str, input_size: int, output_size: int) -> List[Architecture]:
    """Architectures of one family of ``HIDDEN_LAYER_VARIANTS`` for the given data shape."""
    try:
        hidden_layers = HIDDEN_LAYER_VARIANTS[family]
    except KeyError:
        raise ValueError(
            f"Unknown architecture family `{family}`; "
            f"available: {', '.join(HIDDEN_LAYER_VARIANTS)}."
        ) from None
    return [Architecture.from_hidden(input_size, hidden, output_size) for hidden in hidden_layers]

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
Command-line entry point.

Exit codes: 0 on success, 1 on usage, configuration or data errors, 2 when files fail in strict
mode, 3 when an utterance cannot be processed.
"""

from __future__ import annotations
import argparse
import json
import logging
import os
import sys
from typing import TYPE_CHECKING, Dict, List, NoReturn, Optional

from word_recognition.audio.wav import read_wav
from word_recognition.corpus.evaluation import evaluate
from word_recognition.corpus.experiment import sweep_architectures, train_on_featureset
from word_recognition.corpus.featureset import read_featureset, write_featureset
from word_recognition.corpus.featurize import featurize_corpus
from word_recognition.corpus.manifest import scan_corpus, stratified_split, write_manifest
from word_recognition.corpus.synthetic import generate_synthetic_corpus
from word_recognition.features.compression import extract_features
from word_recognition.framework.config import FeatureConfig, load_run_config
from word_recognition.framework.errors import (
    AudioProcessingError,
    IoFailure,
    StrictModeFailure,
    TooFewPoints,
    WordRecognitionError,
)
from word_recognition.framework.seeding import derive_seed, make_rng
from word_recognition.network.architecture import HIDDEN_LAYER_VARIANTS, Architecture, param_count
from word_recognition.network.gradcheck import grad_check
from word_recognition.network.model import init_network, one_hot, predict
from word_recognition.network.serialization import load_model_file, save_model
from word_recognition.utils.output import (
    print_corpus,
    print_evaluation,
    print_featurization,
    print_prediction,
    print_sweep,
    print_training,
    write_failures_to_csv,
    write_history_to_csv,
    write_sweep_to_csv,
)
from word_recognition.utils.validation import validate

if TYPE_CHECKING:
    from collections.abc import Sequence

    from word_recognition.framework.config import RunConfig


log = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_ERROR: int = 1
EXIT_STRICT: int = 2
EXIT_AUDIO: int = 3

GRADCHECK_STREAM: int = 2
GRADCHECK_HIDDEN: int = 20
GRADCHECK_SAMPLES: int = 5


class ArgumentParser(argparse.ArgumentParser):
    """Report usage errors with exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _parse_overrides(items: Sequence[str]) -> Dict[str, str]:
    overrides = {}
    for item in items:
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got `{item}`")
        key, value = (part.strip() for part in item.split("=", maxsplit=1))
        overrides[key] = value
    return overrides


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Configuration file (or defaults), then ``--set`` overrides, then the dedicated flags."""
    config = load_run_config(args.config)
    overrides: Dict[str, object] = dict(_parse_overrides(args.overrides))
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = config.with_overrides(overrides)
    config = config.with_strict(args.strict)
    if args.print_config:
        print(config.to_text(), end="")
    return config


def _feature_config_of(echo: Dict[str, object], config: RunConfig) -> FeatureConfig:
    """Feature settings recorded in a feature file, completed by ``config``."""
    args = config.feature_config().dict()
    args.update({key: value for key, value in echo.items() if key in FeatureConfig.__fields__})
    return FeatureConfig(**args)


def cmd_synth(args: argparse.Namespace, config: RunConfig) -> int:
    generate_synthetic_corpus(
        args.classes, args.samples, config.seed, args.out_dir, jitter=args.jitter
    )
    print(f"== Synthetic corpus:")
    print(f"   - Directory: {args.out_dir}")
    print(f"   - Number of classes: {args.classes}")
    print(f"   - Samples per class: {args.samples}")
    return EXIT_OK


def cmd_featurize(args: argparse.Namespace, config: RunConfig) -> int:
    manifest = scan_corpus(args.corpus_dir)
    train_m, test_m = stratified_split(manifest, config.train_fraction, config.seed)
    print_corpus(manifest, train_m, test_m)

    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as err:
        raise IoFailure(f"Cannot create `{args.out}`: {err}.") from err
    write_manifest(manifest, os.path.join(args.out, "manifest.csv"))
    write_manifest(train_m, os.path.join(args.out, "train_manifest.csv"))
    write_manifest(test_m, os.path.join(args.out, "test_manifest.csv"))

    result = featurize_corpus(
        manifest,
        config.feature_config(),
        config.seed,
        strict=config.strict,
        num_workers=config.num_workers,
    )
    write_failures_to_csv(os.path.join(args.out, "failures.csv"), result.failures)
    fs = result.features
    print_featurization(len(fs), fs.feature_dim, result.failures)

    train_paths = {entry.path for entry in train_m.entries}
    assert fs.entry_indices is not None
    in_train = [manifest.entries[i].path in train_paths for i in fs.entry_indices]
    write_featureset(fs, os.path.join(args.out, "features.csv"))
    write_featureset(
        fs.subset([row for row, flag in enumerate(in_train) if flag]),
        os.path.join(args.out, "train.csv"),
    )
    write_featureset(
        fs.subset([row for row, flag in enumerate(in_train) if not flag]),
        os.path.join(args.out, "test.csv"),
    )
    return EXIT_OK


def _next_to_model(model_path: str, suffix: str) -> str:
    root, _ = os.path.splitext(model_path)
    return f"{root}_{suffix}"


def cmd_train(args: argparse.Namespace, config: RunConfig) -> int:
    fs = read_featureset(args.features)
    feature_config = _feature_config_of(fs.config, config)
    config = config.with_overrides(feature_config.dict())
    arch = Architecture(config.resolve_architecture(fs.num_classes))

    model = train_on_featureset(fs, arch, config.train_config())
    save_model(
        model.network,
        args.out,
        feature_config=feature_config,
        label_table=fs.label_table,
        seed=config.seed,
        scaler=model.scaler,
    )
    write_history_to_csv(args.history or _next_to_model(args.out, "history.csv"), model.history)
    print_training(arch, param_count(arch), model.history)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, config: RunConfig) -> int:
    loaded = load_model_file(args.model)
    fs = read_featureset(args.features)
    report = evaluate(loaded.network, fs, loaded.scaler)
    print_evaluation(report)
    report_path = args.out or _next_to_model(args.model, "report.json")
    try:
        with open(report_path, "w", encoding="utf-8") as report_file:
            json.dump(report.to_json(), report_file, indent=2)
            report_file.write("\n")
    except OSError as err:
        raise IoFailure(f"Cannot write report `{report_path}`: {err}.") from err
    return EXIT_OK


def cmd_predict(args: argparse.Namespace, config: RunConfig) -> int:
    loaded = load_model_file(args.model)
    feature_config = loaded.feature_config or config.feature_config()
    seed = loaded.seed if loaded.seed is not None else config.seed
    vector = extract_features(read_wav(args.wav), feature_config, derive_seed(seed))
    x = loaded.scaler.transform(vector.values) if loaded.scaler is not None else vector.values
    prediction = predict(loaded.network, x)
    labels = loaded.label_table or tuple(
        str(c) for c in range(loaded.network.architecture.output_size)
    )
    print_prediction(labels, prediction.scores)
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace, config: RunConfig) -> int:
    num_classes = args.classes or config.architecture[-1]
    arch = Architecture((config.feature_dim, GRADCHECK_HIDDEN, num_classes))
    net = init_network(arch, config.seed, config.init_scale_rule)
    rng = make_rng(config.seed, GRADCHECK_STREAM)
    samples = [
        (rng.standard_normal(arch.input_size), one_hot(int(rng.integers(num_classes)), num_classes))
        for _ in range(GRADCHECK_SAMPLES)
    ]
    result = grad_check(net, samples, eps=args.eps)

    print(f"== Gradient check:")
    print(f"   - Architecture: {arch}")
    print(f"   - Samples: {len(samples)}")
    print(f"   - Step: {args.eps:g}")
    for sample, (g_bp, g_fd) in enumerate(zip(result.analytic, result.numeric)):
        print(f"   - Sample {sample}:")
        validate(g_bp.as_dict(), g_fd.as_dict())
    print(f"   - Max relative error: {result.max_relative_error:.5E}")
    if result.worst is not None:
        print(f"   - Worst coordinate: {result.worst}")
    if not result.passed(args.tolerance):
        print(
            f"error: gradient check failed at {result.worst} "
            f"(relative error {result.max_relative_error:.3E} >= {args.tolerance:g})",
            file=sys.stderr,
        )
        return EXIT_ERROR
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    train_fs = read_featureset(args.train)
    test_fs = read_featureset(args.test)
    records = sweep_architectures(args.family, train_fs, test_fs, config.train_config())
    write_sweep_to_csv(args.out, records)
    print_sweep(records)
    return EXIT_OK


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key = value configuration file")
    common.add_argument("--seed", type=int, default=None, help="override the configured seed")
    common.add_argument(
        "--strict", action="store_true", help="abort when any file fails to featurize"
    )
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration entry (repeatable)",
    )
    common.add_argument(
        "--print-config", action="store_true", help="print the resolved configuration"
    )

    parser = ArgumentParser(prog="word-recognition", description=__doc__.strip().splitlines()[0])
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debugging"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", parents=[common], help="write a synthetic corpus")
    synth.add_argument("out_dir")
    synth.add_argument("--classes", type=int, default=10)
    synth.add_argument("--samples", type=int, default=30)
    synth.add_argument("--jitter", type=float, default=1.0)
    synth.set_defaults(func=cmd_synth)

    featurize = commands.add_parser(
        "featurize", parents=[common], help="split a corpus and extract its features"
    )
    featurize.add_argument("corpus_dir")
    featurize.add_argument("--out", required=True, help="output directory")
    featurize.set_defaults(func=cmd_featurize)

    train = commands.add_parser("train", parents=[common], help="train a network")
    train.add_argument("features")
    train.add_argument("--out", required=True, help="model file")
    train.add_argument("--history", default=None, help="history CSV (next to the model)")
    train.set_defaults(func=cmd_train)

    evaluate_ = commands.add_parser("evaluate", parents=[common], help="score a feature set")
    evaluate_.add_argument("model")
    evaluate_.add_argument("features")
    evaluate_.add_argument("--out", default=None, help="JSON report (next to the model)")
    evaluate_.set_defaults(func=cmd_evaluate)

    predict_ = commands.add_parser("predict", parents=[common], help="classify one WAV file")
    predict_.add_argument("model")
    predict_.add_argument("wav")
    predict_.set_defaults(func=cmd_predict)

    gradcheck = commands.add_parser(
        "gradcheck", parents=[common], help="compare backpropagation with finite differences"
    )
    gradcheck.add_argument("--classes", type=int, default=None)
    gradcheck.add_argument("--eps", type=float, default=1e-5)
    gradcheck.add_argument("--tolerance", type=float, default=1e-6)
    gradcheck.set_defaults(func=cmd_gradcheck)

    sweep = commands.add_parser(
        "sweep", parents=[common], help="train every hidden-layer variant of a family"
    )
    sweep.add_argument("train")
    sweep.add_argument("test")
    sweep.add_argument("--family", choices=sorted(HIDDEN_LAYER_VARIANTS), default="network1")
    sweep.add_argument("--out", required=True, help="CSV file")
    sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level={0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = resolve_config(args)
        return int(args.func(args, config))
    except argparse.ArgumentTypeError as err:
        parser.error(str(err))
    except StrictModeFailure as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_STRICT
    except TooFewPoints as err:
        print(
            f"error: {err} The voiced part of the recording is too short; record a longer "
            f"utterance or lower `kmeans_k`.",
            file=sys.stderr,
        )
        return EXIT_AUDIO
    except AudioProcessingError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_AUDIO
    except (WordRecognitionError, OSError, ValueError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ERROR

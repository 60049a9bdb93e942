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

"""Exceptions raised across the package."""


class WordRecognitionError(Exception):
    """Base class of all errors raised by ``word_recognition``."""


class InvalidConfig(WordRecognitionError, ValueError):
    pass


class AudioProcessingError(WordRecognitionError, ValueError):
    """The utterance cannot be turned into a feature vector."""


# audio I/O
class MissingFile(WordRecognitionError, FileNotFoundError):
    pass


class MalformedHeader(WordRecognitionError, ValueError):
    pass


class UnsupportedChannels(WordRecognitionError, ValueError):
    pass


class UnsupportedEncoding(WordRecognitionError, ValueError):
    pass


class UnsupportedSampleRate(WordRecognitionError, ValueError):
    pass


# preprocessing
class EmptySignal(AudioProcessingError):
    pass


class SilentSignal(AudioProcessingError):
    pass


class EmptyVoiced(AudioProcessingError):
    pass


class UtteranceTooShort(AudioProcessingError):
    pass


class UpsamplingRequested(WordRecognitionError, ValueError):
    pass


class InvalidSegments(WordRecognitionError, ValueError):
    pass


# features
class NegativeFrequency(WordRecognitionError, ValueError):
    pass


class FrameTooLong(WordRecognitionError, ValueError):
    pass


class TooManyFilters(WordRecognitionError, ValueError):
    pass


class DimensionMismatch(WordRecognitionError, ValueError):
    pass


class TooFewPoints(AudioProcessingError):
    pass


# network
class EmptyTrainingSet(WordRecognitionError, ValueError):
    pass


class NumericalInstability(WordRecognitionError, RuntimeError):
    pass


class IoFailure(WordRecognitionError, OSError):
    pass


class SchemaMismatch(WordRecognitionError, ValueError):
    pass


class ShapeMismatch(WordRecognitionError, ValueError):
    pass


# corpus
class MissingRoot(WordRecognitionError, FileNotFoundError):
    pass


class EmptyCorpus(WordRecognitionError, ValueError):
    pass


class ClassTooSmall(WordRecognitionError, ValueError):
    pass


class InvalidFraction(WordRecognitionError, ValueError):
    pass


class StrictModeFailure(WordRecognitionError, RuntimeError):
    """At least one corpus file failed while strict mode was enabled."""

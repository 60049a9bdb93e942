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

from word_recognition.audio.preprocessing import (
    Segment,
    frame_and_window,
    hamming_window,
    normalize,
    pre_emphasize,
    preprocess,
    remove_silence,
    resample,
    voiced_segments,
    window_energies,
)
from word_recognition.audio.wav import Signal, read_wav, write_wav
from word_recognition.framework.errors import (
    EmptySignal,
    EmptyVoiced,
    InvalidSegments,
    MalformedHeader,
    MissingFile,
    SilentSignal,
    UnsupportedChannels,
    UnsupportedEncoding,
    UnsupportedSampleRate,
    UpsamplingRequested,
    UtteranceTooShort,
)


class TestReadWav:
    def test_pcm16_scaling(self, make_wav):
        path = make_wav("a.wav", np.array([0, 16384, -16384], dtype=np.int16))
        s = read_wav(path)
        np.testing.assert_array_equal(s.samples, [0.0, 0.5, -0.5])
        assert s.rate == 44100

    @pytest.mark.parametrize("subtype", ["PCM_U8", "PCM_24"])
    def test_other_depths(self, make_wav, subtype):
        path = make_wav("b.wav", np.array([0.0, 0.5, -0.5, 0.25]), rate=16000, subtype=subtype)
        s = read_wav(path)
        np.testing.assert_array_equal(s.samples, [0.0, 0.5, -0.5, 0.25])
        assert s.rate == 16000

    def test_stereo(self, make_wav):
        path = make_wav("stereo.wav", np.zeros((10, 2), dtype=np.int16))
        with pytest.raises(UnsupportedChannels):
            read_wav(path)

    def test_float_encoding(self, make_wav):
        path = make_wav("float.wav", np.zeros(10), subtype="FLOAT")
        with pytest.raises(UnsupportedEncoding):
            read_wav(path)

    @pytest.mark.parametrize("rate", [4000, 96000])
    def test_sample_rate_range(self, make_wav, rate):
        path = make_wav("rate.wav", np.zeros(10, dtype=np.int16), rate=rate)
        with pytest.raises(UnsupportedSampleRate):
            read_wav(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            read_wav(str(tmp_path / "nothing.wav"))

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "junk.wav"
        path.write_bytes(b"RIFF\x00\x00not a wave file at all")
        with pytest.raises(MalformedHeader):
            read_wav(str(path))

    def test_write_then_read(self, tmp_path, rng):
        samples = np.round(rng.uniform(-1, 1, size=500) * 32767) / 32768
        path = str(tmp_path / "out.wav")
        write_wav(path, Signal(samples, 22050))
        s = read_wav(path)
        np.testing.assert_array_equal(s.samples, samples)
        assert s.rate == 22050


class TestResample:
    @pytest.mark.parametrize("n_in, n_out", [(441, 100), (29520, 6693)])
    def test_length(self, n_in, n_out, rng):
        out = resample(Signal(rng.standard_normal(n_in), 44100), 10000)
        assert len(out) == n_out
        assert out.rate == 10000

    @pytest.mark.parametrize(
        "rate, target", [(44100, 10000), (16000, 10000), (48000, 10000), (22050, 8000)]
    )
    def test_length_law(self, rate, target, rng):
        x = rng.standard_normal(599)
        for n in range(1, 600):
            assert len(resample(Signal(x[:n], rate), target)) == n * target // rate

    def test_passband_tone(self, tone):
        out = resample(Signal(tone(1000.0, 44100, 44100), 44100), 10000)
        middle = out.samples[1000:9000]
        spectrum = np.abs(np.fft.rfft(middle))
        assert np.argmax(spectrum) == 800
        amplitude = 2 * spectrum[800] / middle.size
        assert amplitude == pytest.approx(0.5, rel=0.01)

    def test_same_rate(self, rng):
        s = Signal(rng.standard_normal(50), 10000)
        assert resample(s, 10000) is s

    def test_upsampling(self):
        with pytest.raises(UpsamplingRequested):
            resample(Signal(np.ones(10), 8000), 10000)

    def test_empty(self):
        with pytest.raises(EmptySignal):
            resample(Signal(np.zeros(0), 44100), 10000)


class TestNormalize:
    @pytest.mark.parametrize(
        "x, expected", [([0.5, -0.25], [1.0, -0.5]), ([1.0, -1.0], [1.0, -1.0])]
    )
    def test_examples(self, x, expected):
        np.testing.assert_array_equal(normalize(Signal(x, 10000)).samples, expected)

    def test_peak_is_one(self, rng):
        out = normalize(Signal(rng.standard_normal(100) * 1e-3, 10000))
        assert np.max(np.abs(out.samples)) == 1.0

    def test_idempotent(self, rng):
        once = normalize(Signal(rng.standard_normal(500) * 37.0, 10000))
        np.testing.assert_array_equal(normalize(once).samples, once.samples)

    def test_silent(self):
        with pytest.raises(SilentSignal):
            normalize(Signal(np.zeros(3), 10000))


class TestVoiceActivity:
    def test_all_zero(self):
        assert voiced_segments(Signal(np.zeros(5000), 10000)) == []

    def test_constant(self):
        segs = voiced_segments(Signal(np.ones(10800), 10000))
        assert segs == [Segment(0, 10800)]

    def test_burst(self):
        x = np.concatenate((np.zeros(2160), np.full(2160, 0.9), np.zeros(2160)))
        segs = voiced_segments(Signal(x, 10000), threshold_ratio=0.1)
        assert segs == [Segment(2160, 4320)]

    def test_separate_bursts(self):
        burst = np.full(1080, 0.5)
        gap = np.zeros(3240)
        x = np.concatenate((burst, gap, burst))
        segs = voiced_segments(Signal(x, 10000))
        assert segs == [Segment(0, 1080), Segment(4320, 5400)]

    def test_partial_window_energy(self):
        energies = window_energies(Signal(np.ones(2500), 10000), 1080)
        np.testing.assert_array_equal(energies, [1080.0, 1080.0, 340.0])

    def test_threshold_is_scale_invariant(self, rng):
        x = rng.standard_normal(20000) * np.linspace(0, 1, 20000) ** 4
        assert voiced_segments(Signal(x, 10000)) == voiced_segments(Signal(x * 2.0**-10, 10000))

    def test_threshold_monotone(self, rng):
        x = rng.standard_normal(30000) * np.abs(np.sin(np.linspace(0, 9, 30000))) ** 3
        s = Signal(x, 10000)
        voiced = [
            sum(len(seg) for seg in voiced_segments(s, threshold_ratio=ratio))
            for ratio in np.linspace(0.005, 0.995, 45)
        ]
        assert all(b <= a for a, b in zip(voiced, voiced[1:]))
        assert voiced[-1] < voiced[0]


class TestRemoveSilence:
    def test_identity(self, rng):
        s = Signal(rng.standard_normal(300), 10000)
        np.testing.assert_array_equal(remove_silence(s, [Segment(0, 300)]).samples, s.samples)

    def test_concatenation(self):
        s = Signal(np.arange(300.0), 10000)
        out = remove_silence(s, [Segment(0, 100), Segment(200, 300)])
        np.testing.assert_array_equal(
            out.samples, np.concatenate((np.arange(100.0), np.arange(200.0, 300.0)))
        )

    def test_empty(self):
        with pytest.raises(EmptyVoiced):
            remove_silence(Signal(np.ones(10), 10000), [])

    @pytest.mark.parametrize(
        "segs", [[Segment(0, 100), Segment(50, 150)], [Segment(0, 400)]]
    )
    def test_invalid(self, segs):
        with pytest.raises(InvalidSegments):
            remove_silence(Signal(np.ones(300), 10000), segs)

    def test_invalid_segment(self):
        with pytest.raises(InvalidSegments):
            Segment(5, 5)


class TestPreEmphasis:
    @pytest.mark.parametrize(
        "x, expected",
        [([1.0, 1.0, 1.0], [1.0, 0.0625, 0.0625]), ([0.0, 1.0, 0.0], [0.0, 1.0, -0.9375])],
    )
    def test_examples(self, x, expected):
        np.testing.assert_allclose(pre_emphasize(Signal(x, 10000)).samples, expected)

    def test_zero_coefficient(self, rng):
        x = rng.standard_normal(20)
        np.testing.assert_array_equal(pre_emphasize(Signal(x, 10000), a=0.0).samples, x)

    @pytest.mark.parametrize("c", [1.0, -0.3, 0.7071])
    @pytest.mark.parametrize("a", [0.9375, 0.5, 0.97])
    def test_constant_input(self, c, a):
        y = pre_emphasize(Signal(np.full(50, c), 10000), a=a).samples
        assert y[0] == c
        # c - a * c rounds differently from c * (1 - a)
        np.testing.assert_allclose(y[1:], c * (1 - a), rtol=0, atol=1e-15)


class TestFraming:
    @pytest.mark.parametrize("n, frames", [(4510, 43), (300, 1), (399, 1), (400, 2)])
    def test_frame_count(self, n, frames):
        assert frame_and_window(Signal(np.ones(n), 10000)).num_frames == frames

    def test_hamming_window(self):
        w = hamming_window(300)
        expected = 0.54 - 0.46 * np.cos(2 * np.pi * np.arange(300) / 299)
        np.testing.assert_allclose(w, expected, rtol=0, atol=1e-14)
        assert w[0] == pytest.approx(0.08)
        assert w[-1] == pytest.approx(0.08)
        np.testing.assert_allclose(w, w[::-1], rtol=0, atol=1e-14)

    def test_windowing(self, rng):
        x = rng.standard_normal(1000)
        fm = frame_and_window(Signal(x, 10000))
        w = 0.54 - 0.46 * np.cos(2 * np.pi * np.arange(300) / 299)
        np.testing.assert_allclose(fm.frames[3], x[300:600] * w)

    def test_reconstruction(self, rng):
        x = rng.standard_normal(4510)
        fm = frame_and_window(Signal(x, 10000))
        for t in range(fm.num_frames):
            np.testing.assert_allclose(
                fm.frames[t] / hamming_window(300), x[t * 100 : t * 100 + 300], rtol=1e-12
            )

    def test_too_short(self):
        with pytest.raises(UtteranceTooShort):
            frame_and_window(Signal(np.ones(299), 10000))


class TestPreprocess:
    def test_trims_silence(self, feature_config, tone):
        voiced = tone(440.0, 22050, 44100, amplitude=0.3)
        x = np.concatenate((np.zeros(22050), voiced, np.zeros(22050)))
        out = preprocess(Signal(x, 44100), feature_config)
        assert out.rate == 10000
        # 0.5 s of tone at 10 kHz, rounded to whole VAD windows
        assert 4000 <= len(out) <= 7300

    def test_digital_silence(self, feature_config):
        with pytest.raises(EmptyVoiced):
            preprocess(Signal(np.zeros(44100), 44100), feature_config)

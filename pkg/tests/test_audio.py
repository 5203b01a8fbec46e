import struct

import numpy as np
import pytest

from multidx.audio import (
    AudioClip,
    AudioError,
    decode_wav,
    dominant_frequency,
    encode_wav,
    extract_features,
)
from oracles import dft_bruteforce


def make_wav(samples, sample_rate=8000, channels=1, bits=16, audio_format=1):
    samples = np.asarray(samples)
    if bits == 16:
        body = np.asarray(samples, dtype="<i2").tobytes()
    else:
        body = np.asarray(samples, dtype="<f4").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(body),
        b"WAVE",
        b"fmt ",
        16,
        audio_format,
        channels,
        sample_rate,
        sample_rate * channels * bits // 8,
        channels * bits // 8,
        bits,
        b"data",
        len(body),
    )
    return header + body


class TestDecodeWav:
    def test_zero_sample_decodes_to_zero(self):
        clip = decode_wav(make_wav([0, 0, 0, 0]))
        assert np.array_equal(clip.samples, np.zeros(4))

    def test_int16_min_maps_to_minus_one(self):
        clip = decode_wav(make_wav([-32768, 32767]))
        assert clip.samples[0] == -1.0
        assert clip.samples[1] == pytest.approx(32767 / 32768)

    def test_stereo_averaged(self):
        # L=0.5, R=-0.5 -> 0.0
        clip = decode_wav(make_wav([16384, -16384], channels=2))
        assert clip.samples[0] == 0.0

    def test_float32_passthrough(self):
        clip = decode_wav(make_wav([0.25, -0.75], bits=32, audio_format=3))
        assert np.allclose(clip.samples, [0.25, -0.75], atol=1e-7)

    def test_unsupported_codec_rejected(self):
        with pytest.raises(AudioError, match="unsupported encoding"):
            decode_wav(make_wav([0, 0], audio_format=7))

    def test_truncated_header_rejected(self):
        with pytest.raises(AudioError, match="malformed wav"):
            decode_wav(b"RIFF\x00\x00")

    def test_sample_rate_preserved(self):
        clip = decode_wav(make_wav([0, 1, 2], sample_rate=44100))
        assert clip.sample_rate == 44100

    def test_encode_decode_round_trip(self):
        rng = np.random.default_rng(1)
        samples = rng.uniform(-0.9, 0.9, size=512)
        clip = AudioClip(samples=samples, sample_rate=16000)
        back = decode_wav(encode_wav(clip))
        assert back.sample_rate == 16000
        assert np.allclose(back.samples, samples, atol=1.0 / 32768)


def sine(freq, sample_rate=8000, seconds=1.0, amplitude=0.9):
    t = np.arange(int(sample_rate * seconds)) / sample_rate
    return AudioClip(samples=amplitude * np.sin(2 * np.pi * freq * t), sample_rate=sample_rate)


class TestDominantFrequency:
    def test_dc_only_signal(self):
        clip = AudioClip(samples=np.full(512, 0.5), sample_rate=8000)
        assert dominant_frequency(clip) == 0.0

    def test_pure_tone_within_one_bin(self):
        clip = sine(440.0)
        bin_width = clip.sample_rate / clip.samples.size
        assert abs(dominant_frequency(clip) - 440.0) <= bin_width

    def test_stronger_component_wins(self):
        t = np.arange(8000) / 8000
        mix = np.sin(2 * np.pi * 300 * t) + 0.3 * np.sin(2 * np.pi * 900 * t)
        clip = AudioClip(samples=mix / 1.3, sample_rate=8000)
        assert abs(dominant_frequency(clip) - 300.0) <= 2.0

    def test_matches_naive_dft_oracle_on_noise(self):
        rng = np.random.default_rng(77)
        x = rng.uniform(-1, 1, size=1024)
        clip = AudioClip(samples=x, sample_rate=2048)
        centered = x - x.mean()
        windowed = centered * np.hanning(x.size)
        mags = dft_bruteforce(windowed)
        oracle_bin = 1 + int(np.argmax(mags[1:]))
        assert dominant_frequency(clip) == pytest.approx(
            oracle_bin * 2048 / 1024, abs=1e-9
        )

    def test_fft_matches_naive_dft_magnitudes(self):
        rng = np.random.default_rng(3)
        for n in (256, 1000, 4096):
            x = rng.normal(size=n)
            fast = np.abs(np.fft.rfft(x))
            slow = dft_bruteforce(x)
            scale = np.max(slow)
            assert np.allclose(fast / scale, slow / scale, atol=1e-6)

    def test_too_short_clip_rejected(self):
        clip = AudioClip(samples=np.zeros(100), sample_rate=8000)
        with pytest.raises(AudioError, match="too short"):
            dominant_frequency(clip)


class TestExtractFeatures:
    def test_symmetric_signal_zero_mean_and_skew(self):
        base = np.tile([-1.0, 0.0, 1.0], 100)
        feats = extract_features(AudioClip(samples=base, sample_rate=8000))
        assert feats.mean == pytest.approx(0.0, abs=1e-12)
        assert feats.skewness == pytest.approx(0.0, abs=1e-12)

    def test_two_point_kurtosis(self):
        # alternating -1, 1: m2=1, m4=1 -> excess kurtosis -2
        base = np.tile([-1.0, 1.0], 200)
        feats = extract_features(AudioClip(samples=base, sample_rate=8000))
        assert feats.kurtosis == pytest.approx(-2.0, abs=1e-12)

    def test_constant_signal_conventions(self):
        feats = extract_features(AudioClip(samples=np.full(512, 0.3), sample_rate=8000))
        assert feats.std_dev == 0.0
        assert feats.skewness == 0.0
        assert feats.kurtosis == 0.0
        assert feats.dominant_frequency == 0.0

    def test_tone_dominant_frequency_field(self):
        clip = sine(440.0)
        feats = extract_features(clip)
        assert abs(feats.dominant_frequency - 440.0) <= clip.sample_rate / clip.samples.size

    def test_amplitude_scaling_behaviour(self):
        rng = np.random.default_rng(4)
        x = rng.uniform(-0.5, 0.5, size=2048)
        a = 1.7
        f1 = extract_features(AudioClip(samples=x, sample_rate=8000))
        f2 = extract_features(AudioClip(samples=a * x, sample_rate=8000))
        assert f2.minimum == pytest.approx(a * f1.minimum, abs=1e-9)
        assert f2.maximum == pytest.approx(a * f1.maximum, abs=1e-9)
        assert f2.mean == pytest.approx(a * f1.mean, abs=1e-9)
        assert f2.std_dev == pytest.approx(a * f1.std_dev, abs=1e-9)
        assert f2.skewness == pytest.approx(f1.skewness, abs=1e-9)
        assert f2.kurtosis == pytest.approx(f1.kurtosis, abs=1e-9)
        assert f2.dominant_frequency == f1.dominant_frequency

    def test_moment_bounds(self):
        rng = np.random.default_rng(5)
        feats = extract_features(
            AudioClip(samples=rng.uniform(-1, 1, 512), sample_rate=8000)
        )
        assert feats.minimum <= feats.mean <= feats.maximum
        assert feats.std_dev >= 0.0
        assert 0.0 <= feats.dominant_frequency <= 4000.0

"""Cough-recording decode and hand-crafted feature extraction.

Seven features per clip: minimum, maximum, mean, standard deviation,
skewness, kurtosis (excess) and dominant frequency. Moments use
population normalization; kurtosis is Fisher (normal => 0).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

AUDIO_FEATURE_NAMES = (
    "Minimum",
    "Maximum",
    "Mean",
    "StandardDeviation",
    "Skewness",
    "Kurtosis",
    "DominantFrequency",
)

MIN_CLIP_SAMPLES = 256


class AudioError(ValueError):
    """Raised for malformed or unsupported audio input."""


@dataclass(frozen=True)
class AudioClip:
    """Mono samples in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise AudioError("clip must hold a non-empty 1-d sample sequence")
        if self.sample_rate <= 0:
            raise AudioError("sample rate must be positive")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)


@dataclass(frozen=True)
class AudioFeatures:
    minimum: float
    maximum: float
    mean: float
    std_dev: float
    skewness: float
    kurtosis: float
    dominant_frequency: float

    def as_vector(self) -> np.ndarray:
        """Feature vector in AUDIO_FEATURE_NAMES order."""
        return np.array(
            [
                self.minimum,
                self.maximum,
                self.mean,
                self.std_dev,
                self.skewness,
                self.kurtosis,
                self.dominant_frequency,
            ]
        )


# ---------------------------------------------------------------------------
# WAV container
# ---------------------------------------------------------------------------

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


def decode_wav(data: bytes) -> AudioClip:
    """Parse a RIFF/WAVE container into a mono AudioClip.

    Accepts 16-bit PCM or 32-bit IEEE float, mono or stereo. Stereo is
    averaged to mono; 16-bit samples are scaled by 1/32768.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioError("malformed wav: missing RIFF/WAVE header")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise AudioError("malformed wav: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise AudioError("malformed wav: truncated data chunk")
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise AudioError("malformed wav: missing fmt or data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format == _FMT_EXTENSIBLE:
        raise AudioError("unsupported encoding: extensible wav")
    if channels not in (1, 2):
        raise AudioError(f"unsupported encoding: {channels} channels")

    if audio_format == _FMT_PCM and bits == 16:
        raw = np.frombuffer(payload[: len(payload) // 2 * 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == _FMT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload[: len(payload) // 4 * 4], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        raise AudioError(
            f"unsupported encoding: format {audio_format}, {bits}-bit samples"
        )

    if channels == 2:
        samples = samples[: samples.size // 2 * 2].reshape(-1, 2).mean(axis=1)
    if samples.size == 0:
        raise AudioError("malformed wav: empty data chunk")
    return AudioClip(samples=samples, sample_rate=int(sample_rate))


def encode_wav(clip: AudioClip) -> bytes:
    """Serialize a clip as 16-bit PCM mono WAV (test fixtures, CLI input)."""
    pcm = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(body),
        b"WAVE",
        b"fmt ",
        16,
        _FMT_PCM,
        1,
        clip.sample_rate,
        clip.sample_rate * 2,
        2,
        16,
        b"data",
        len(body),
    )
    return header + body


# ---------------------------------------------------------------------------
# Features
# ---------------------------------------------------------------------------

def dominant_frequency(clip: AudioClip) -> float:
    """Frequency (Hz) of the strongest non-DC spectral bin.

    The signal is mean-subtracted and Hann-windowed before the magnitude
    DFT; the argmax runs over bins 1..N/2 with ties toward the lower
    frequency. A constant clip has no AC energy and returns 0.
    """
    x = clip.samples
    if x.size < MIN_CLIP_SAMPLES:
        raise AudioError(f"clip too short: need >= {MIN_CLIP_SAMPLES} samples")
    if x.max() == x.min():  # constant clip: no AC energy
        return 0.0
    centered = x - x.mean()
    window = np.hanning(x.size)
    mags = np.abs(np.fft.rfft(centered * window))
    bin_idx = 1 + int(np.argmax(mags[1:]))
    return bin_idx * clip.sample_rate / x.size


def extract_features(clip: AudioClip) -> AudioFeatures:
    """Compute the seven hand-crafted cough features for one clip."""
    x = clip.samples
    if x.size < MIN_CLIP_SAMPLES:
        raise AudioError(f"clip too short: need >= {MIN_CLIP_SAMPLES} samples")
    mean = float(x.mean())
    centered = x - mean
    m2 = 0.0 if x.max() == x.min() else float(np.mean(centered**2))
    if m2 == 0.0:
        skewness, kurtosis = 0.0, 0.0
    else:
        m3 = float(np.mean(centered**3))
        m4 = float(np.mean(centered**4))
        skewness = m3 / m2**1.5
        kurtosis = m4 / m2**2 - 3.0
    return AudioFeatures(
        minimum=float(x.min()),
        maximum=float(x.max()),
        mean=mean,
        std_dev=float(np.sqrt(m2)),
        skewness=skewness,
        kurtosis=kurtosis,
        dominant_frequency=dominant_frequency(clip),
    )

"""Minimal audio loading for the extractor: RIFF PCM16 in, 16 kHz mono out."""

import struct

import numpy as np

from .errors import AudioDecodeError

TARGET_RATE = 16000


def decode_wav(data: bytes):
    """RIFF PCM16 bytes -> (float64 samples in [-1, 1], sample_rate)."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioDecodeError("not a RIFF/WAVE stream")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise AudioDecodeError(f"truncated chunk {chunk_id!r}")
        if chunk_id == b"fmt ":
            if size < 16:
                raise AudioDecodeError("fmt chunk too short")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise AudioDecodeError("missing fmt or data chunk")
    audio_format, channels, rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1 or bits != 16:
        raise AudioDecodeError(
            f"unsupported encoding (format {audio_format}, {bits}-bit)"
        )
    if channels not in (1, 2):
        raise AudioDecodeError(f"{channels} channels unsupported")
    if len(payload) % (2 * channels):
        raise AudioDecodeError("data chunk not a whole number of frames")
    samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    return samples, rate


def resample_linear(samples: np.ndarray, rate: int, target: int = TARGET_RATE):
    """Linear-interpolation resampler; adequate for feature extraction."""
    if rate == target or len(samples) == 0:
        return samples, rate
    n_out = int(round(len(samples) * target / rate))
    src_t = np.arange(len(samples)) / rate
    dst_t = np.arange(n_out) / target
    return np.interp(dst_t, src_t, samples), target


def load_audio(path) -> np.ndarray:
    """Read a WAV file, downmix to mono, resample to 16 kHz, normalize.

    Normalization is zero mean / unit population variance; constant or
    empty signals are passed through unchanged (silence stays silence and
    is labeled NO_PHONEME downstream).
    """
    try:
        data = open(path, "rb").read()
    except OSError as exc:
        raise AudioDecodeError(f"cannot read {path}: {exc}") from exc
    samples, rate = decode_wav(data)
    samples, _rate = resample_linear(samples, rate)
    std = samples.std()
    if std > 1e-12:
        samples = (samples - samples.mean()) / std
    return samples

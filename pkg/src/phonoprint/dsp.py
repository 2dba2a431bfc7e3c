"""Audio I/O, normalization, and the test-time perturbation suite.

Perturbations (additive Gaussian noise at target SNR, 8-bit mu-law
round-trip, MP3 via an external encoder) are applied to TEST tracks only;
reference audio used for profiles stays clean.

WAV support is deliberately narrow: RIFF PCM 16-bit, mono or stereo
(stereo is averaged to mono with a warning), 16 kHz unless the caller
opts into pass-through.
"""

from __future__ import annotations

import logging
import os
import shutil
import struct
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateSignal,
    DurationDrift,
    EncoderFailed,
    EncoderMissing,
    LengthMismatch,
    NotRiff,
    SampleRateMismatch,
    SilentSignal,
    TruncatedFile,
    UnsupportedBitDepth,
    UnsupportedCodec,
)

log = logging.getLogger(__name__)

ENCODER_ENV_VAR = "PHONOPRINT_MP3_ENCODER"

_MU = 255.0
_MULAW_LEVELS = 127  # zero-preserving mid-tread: codes -127..127


@dataclass
class AudioTrack:
    """Mono audio, float samples nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int = 16000

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {self.samples.shape}")

    def __len__(self) -> int:
        return len(self.samples)

    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(data: bytes, allow_any_rate: bool = False) -> AudioTrack:
    """Decode RIFF PCM16 bytes; samples are scaled to [-1, 1] via /32768.

    Stereo input is averaged to mono with a warning. Non-16 kHz input is
    rejected with SampleRateMismatch unless allow_any_rate is set.
    """
    if len(data) < 12:
        raise TruncatedFile(f"{len(data)} bytes is too short for a RIFF header")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotRiff("missing RIFF/WAVE signature")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise TruncatedFile(f"chunk {chunk_id!r} claims {size} bytes", offset=pos)
        if chunk_id == b"fmt ":
            if size < 16:
                raise TruncatedFile("fmt chunk shorter than 16 bytes", offset=pos)
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)
    if fmt is None or payload is None:
        raise NotRiff("missing fmt or data chunk")
    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1:
        raise UnsupportedCodec(f"WAVE format tag {audio_format}, only PCM (1) supported")
    if bits != 16:
        raise UnsupportedBitDepth(f"{bits}-bit samples, only 16-bit supported")
    if channels not in (1, 2):
        raise UnsupportedCodec(f"{channels} channels, only mono or stereo supported")
    if sample_rate != 16000 and not allow_any_rate:
        raise SampleRateMismatch(f"sample rate {sample_rate} Hz, expected 16000")
    frame_bytes = 2 * channels
    if len(payload) % frame_bytes:
        raise TruncatedFile("data chunk is not a whole number of frames")
    raw = np.frombuffer(payload, dtype="<i2").astype(np.float64)
    if channels == 2:
        log.warning("averaging stereo input to mono")
        raw = raw.reshape(-1, 2).mean(axis=1)
    return AudioTrack(samples=raw / 32768.0, sample_rate=sample_rate)


def write_wav(track: AudioTrack) -> bytes:
    """Encode to mono PCM16 with saturating round-to-nearest; deterministic."""
    pcm = np.clip(np.rint(track.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = pcm.tobytes()
    header = (
        b"RIFF"
        + struct.pack("<I", 36 + len(payload))
        + b"WAVE"
        + b"fmt "
        + struct.pack(
            "<IHHIIHH",
            16,
            1,
            1,
            track.sample_rate,
            track.sample_rate * 2,
            2,
            16,
        )
        + b"data"
        + struct.pack("<I", len(payload))
    )
    return header + payload


def normalize(track: AudioTrack) -> AudioTrack:
    """Zero mean, unit population variance. Raises DegenerateSignal."""
    std = float(np.std(track.samples))
    if std < 1e-12:
        raise DegenerateSignal("constant signal cannot be normalized")
    return AudioTrack(
        samples=(track.samples - np.mean(track.samples)) / std,
        sample_rate=track.sample_rate,
    )


def add_awgn(track: AudioTrack, snr_db: float, seed: int) -> AudioTrack:
    """Add white Gaussian noise at the requested SNR; deterministic per seed.

    Noise variance is P_signal / 10^(snr_db / 10). Raises SilentSignal.
    """
    power = float(np.mean(track.samples**2))
    if power <= 0.0:
        raise SilentSignal("cannot set an SNR against a silent signal")
    noise_std = np.sqrt(power / 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_std, size=len(track.samples))
    return AudioTrack(samples=track.samples + noise, sample_rate=track.sample_rate)


def mulaw_compress(x: np.ndarray) -> np.ndarray:
    """Continuous mu-law companding curve (mu = 255) on [-1, 1]."""
    return np.sign(x) * np.log1p(_MU * np.abs(x)) / np.log1p(_MU)


def mulaw_roundtrip(track: AudioTrack) -> AudioTrack:
    """Compress, quantize to 8 bits, expand; models telephony companding.

    Input is clamped to [-1, 1] first. The quantizer is a zero-preserving
    mid-tread over codes -127..127, so silence survives exactly and full
    scale round-trips to within one step. Length and rate are unchanged.
    """
    x = np.clip(track.samples, -1.0, 1.0)
    codes = np.rint(mulaw_compress(x) * _MULAW_LEVELS)
    magnitude = np.expm1(np.abs(codes) / _MULAW_LEVELS * np.log1p(_MU)) / _MU
    out = np.clip(np.sign(codes) * magnitude, -1.0, 1.0)
    return AudioTrack(samples=out, sample_rate=track.sample_rate)


def measure_snr(clean: AudioTrack, noisy: AudioTrack) -> float:
    """10 log10(P_clean / P_noise) with noise = noisy - clean, in dB.

    Identical inputs report math.inf. Raises LengthMismatch, SilentSignal.
    """
    if len(clean) != len(noisy):
        raise LengthMismatch(f"{len(clean)} vs {len(noisy)} samples")
    p_clean = float(np.mean(clean.samples**2))
    if p_clean <= 0.0:
        raise SilentSignal("clean signal has zero power")
    p_noise = float(np.mean((noisy.samples - clean.samples) ** 2))
    if p_noise == 0.0:
        return float("inf")
    return 10.0 * np.log10(p_clean / p_noise)


def _resolve_encoder(encoder_path: str | None) -> str:
    candidates = [encoder_path, os.environ.get(ENCODER_ENV_VAR), "ffmpeg", "lame"]
    for cand in candidates:
        if not cand:
            continue
        resolved = cand if os.path.sep in cand and os.path.isfile(cand) else shutil.which(cand)
        if resolved:
            return resolved
        if cand is encoder_path or cand == os.environ.get(ENCODER_ENV_VAR):
            raise EncoderMissing(f"encoder {cand!r} not found")
    raise EncoderMissing(
        "no MP3 encoder found; install ffmpeg or lame, or set "
        f"{ENCODER_ENV_VAR}"
    )


def _encoder_commands(encoder: str, wav_in: str, mp3: str, wav_out: str,
                      bitrate_kbps: int, sample_rate: int):
    name = Path(encoder).name.lower()
    if "ffmpeg" in name:
        encode = [encoder, "-y", "-loglevel", "error", "-i", wav_in,
                  "-codec:a", "libmp3lame", "-b:a", f"{bitrate_kbps}k", mp3]
        decode = [encoder, "-y", "-loglevel", "error", "-i", mp3,
                  "-ar", str(sample_rate), "-ac", "1", wav_out]
    else:
        # lame-style CLI: `lame -b 128 --cbr in.wav out.mp3`,
        # `lame --decode in.mp3 out.wav`
        encode = [encoder, "--quiet", "-b", str(bitrate_kbps), "--cbr", wav_in, mp3]
        decode = [encoder, "--quiet", "--decode", mp3, wav_out]
    return encode, decode


def mp3_roundtrip_external(
    track: AudioTrack,
    encoder_path: str | None = None,
    bitrate_kbps: int = 128,
) -> AudioTrack:
    """WAV -> MP3 (CBR) -> WAV through an external encoder binary.

    ffmpeg and lame command lines are supported, auto-detected from the
    binary name; the binary is taken from encoder_path, the
    PHONOPRINT_MP3_ENCODER environment variable, or PATH, in that order.
    Decoded audio is trimmed or zero-padded back to the input length;
    drift beyond 50 ms raises DurationDrift. Raises EncoderMissing,
    EncoderFailed.
    """
    encoder = _resolve_encoder(encoder_path)
    with tempfile.TemporaryDirectory(prefix="phonoprint-mp3-") as work:
        wav_in = os.path.join(work, "in.wav")
        mp3 = os.path.join(work, "roundtrip.mp3")
        wav_out = os.path.join(work, "out.wav")
        Path(wav_in).write_bytes(write_wav(track))
        encode, decode = _encoder_commands(
            encoder, wav_in, mp3, wav_out, bitrate_kbps, track.sample_rate
        )
        for cmd in (encode, decode):
            proc = subprocess.run(cmd, capture_output=True, text=True)
            if proc.returncode != 0:
                raise EncoderFailed(
                    f"{' '.join(cmd)} exited {proc.returncode}: "
                    f"{proc.stderr.strip()[:500]}"
                )
        decoded = read_wav(Path(wav_out).read_bytes(), allow_any_rate=True)
    if decoded.sample_rate != track.sample_rate:
        raise EncoderFailed(
            f"decoder returned {decoded.sample_rate} Hz, expected {track.sample_rate}"
        )
    drift = abs(len(decoded) - len(track))
    if drift > 0.05 * track.sample_rate:
        raise DurationDrift(f"round-trip changed length by {drift} samples")
    samples = decoded.samples[: len(track)]
    if len(samples) < len(track):
        samples = np.pad(samples, (0, len(track) - len(samples)))
    return AudioTrack(samples=samples, sample_rate=track.sample_rate)

"""Frame-labeling and feature backends.

A backend is a callable taking (samples, frame_starts, frame_len) and
returning (phoneme_ids, features) with one row per frame: phoneme_ids is
uint16 with 0xFFFF for frames carrying no phoneme, features is float32 of
a backend-determined dimension.

Two implementations:

* SpectralBackend: pure-numpy filterbank features plus an energy/centroid
  pseudo-recognizer. Fully offline and bit-deterministic; the default, and
  what the test suite runs against.
* Wav2Vec2Backend: wraps a pretrained CTC phoneme recognizer and a
  pretrained feature encoder (transformers). Model identifiers are
  configuration, so alternative checkpoints are drop-in. Requires the
  'wav2vec2' extra and available checkpoints.
"""

import numpy as np

from .errors import ModelLoadError
from .pafio import NO_PHONEME


def frame_matrix(samples: np.ndarray, starts: np.ndarray, frame_len: int):
    """Stack (possibly zero-padded) sample windows, one row per frame."""
    out = np.zeros((len(starts), frame_len), dtype=np.float64)
    for row, s in enumerate(starts):
        chunk = samples[s : s + frame_len]
        out[row, : len(chunk)] = chunk
    return out


def mel_filterbank(n_bands: int, n_fft_bins: int, sample_rate: int):
    def hz_to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def mel_to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    edges_hz = mel_to_hz(
        np.linspace(0.0, hz_to_mel(sample_rate / 2), n_bands + 2)
    )
    bin_hz = np.linspace(0.0, sample_rate / 2, n_fft_bins)
    bank = np.zeros((n_bands, n_fft_bins))
    for b in range(n_bands):
        lo, mid, hi = edges_hz[b], edges_hz[b + 1], edges_hz[b + 2]
        up = (bin_hz - lo) / max(mid - lo, 1e-9)
        down = (hi - bin_hz) / max(hi - mid, 1e-9)
        bank[b] = np.clip(np.minimum(up, down), 0.0, 1.0)
    return bank


class SpectralBackend:
    """Deterministic DSP stand-in for pretrained recognizer + encoder.

    Features are log mel-band energies. Frames whose RMS falls below
    silence_rms are labeled NO_PHONEME; voiced frames map to an inventory
    index by quantizing the spectral centroid, so steady sounds produce
    stable phoneme runs.
    """

    def __init__(self, n_labels: int, dim: int = 32, sample_rate: int = 16000,
                 silence_rms: float = 0.1):
        self.n_labels = n_labels
        self.dim = dim
        self.sample_rate = sample_rate
        self.silence_rms = silence_rms

    def __call__(self, samples, starts, frame_len):
        frames = frame_matrix(samples, starts, frame_len)
        window = np.hanning(frame_len)
        spectra = np.abs(np.fft.rfft(frames * window, axis=1)) ** 2
        bank = mel_filterbank(self.dim, spectra.shape[1], self.sample_rate)
        features = np.log1p(spectra @ bank.T).astype(np.float32)

        rms = np.sqrt(np.mean(frames**2, axis=1))
        freqs = np.linspace(0.0, self.sample_rate / 2, spectra.shape[1])
        power = spectra.sum(axis=1)
        centroid = np.where(
            power > 0, (spectra * freqs).sum(axis=1) / np.maximum(power, 1e-30), 0.0
        )
        bins = np.clip(
            (centroid / (self.sample_rate / 2) * self.n_labels).astype(np.int64),
            0,
            self.n_labels - 1,
        )
        ids = np.where(rms < self.silence_rms, NO_PHONEME, bins).astype(np.uint16)
        return ids, features


class Wav2Vec2Backend:
    """Pretrained recognizer + encoder pair, time-aligned onto the grid.

    The recognizer is a CTC model whose per-frame argmax tokens are mapped
    onto the output inventory by label string; blank/special tokens and
    tokens outside the inventory become NO_PHONEME. The encoder contributes
    the per-frame feature vectors (hidden-state dimension defines dim).
    Both models consume 16 kHz mono audio and share the conv frame grid
    (stride 320 samples, 400-sample receptive field), so grid mapping is
    nearest frame center.
    """

    MODEL_HOP = 320
    MODEL_CENTER = 200  # receptive-field center offset of the conv stack

    def __init__(self, recognizer_id: str, encoder_id: str,
                 inventory: tuple, device: str = "cpu"):
        try:
            import torch
            from transformers import (
                Wav2Vec2ForCTC,
                Wav2Vec2Model,
                Wav2Vec2Processor,
            )
        except ImportError as exc:
            raise ModelLoadError(
                "wav2vec2 backend needs the 'wav2vec2' extra (torch, transformers)"
            ) from exc
        self._torch = torch
        try:
            self.processor = Wav2Vec2Processor.from_pretrained(recognizer_id)
            self.recognizer = Wav2Vec2ForCTC.from_pretrained(recognizer_id)
            self.encoder = Wav2Vec2Model.from_pretrained(encoder_id)
        except Exception as exc:
            raise ModelLoadError(f"cannot load models: {exc}") from exc
        self.device = device
        self.recognizer.to(device).eval()
        self.encoder.to(device).eval()
        vocab = self.processor.tokenizer.get_vocab()
        label_to_id = {label: i for i, label in enumerate(inventory)}
        self.token_map = np.full(len(vocab), NO_PHONEME, dtype=np.uint16)
        for token, token_id in vocab.items():
            if token in label_to_id:
                self.token_map[token_id] = label_to_id[token]

    def __call__(self, samples, starts, frame_len):
        torch = self._torch
        wave = torch.tensor(samples, dtype=torch.float32, device=self.device)
        wave = wave.unsqueeze(0)
        with torch.no_grad():
            logits = self.recognizer(wave).logits[0]
            hidden = self.encoder(wave).last_hidden_state[0]
        tokens = logits.argmax(dim=-1).cpu().numpy()
        features = hidden.cpu().numpy().astype(np.float32)
        n_model = min(len(tokens), len(features))
        if n_model == 0:
            return (
                np.full(len(starts), NO_PHONEME, dtype=np.uint16),
                np.zeros((len(starts), features.shape[1]), dtype=np.float32),
            )
        centers = np.asarray(starts) + frame_len // 2
        nearest = np.clip(
            np.rint((centers - self.MODEL_CENTER) / self.MODEL_HOP).astype(int),
            0,
            n_model - 1,
        )
        return self.token_map[tokens[nearest]], features[nearest]

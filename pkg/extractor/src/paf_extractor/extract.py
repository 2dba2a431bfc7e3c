"""Audio -> PAF extraction on the 400/320-sample frame grid."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import load_audio
from .backends import SpectralBackend, Wav2Vec2Backend
from .errors import AlignmentError
from .pafio import NO_PHONEME, write_paf_bytes

# Default output inventory: the seven IPA category tables, concatenated.
DEFAULT_INVENTORY = (
    "i", "æ", "ɑ", "ɪ", "ʌ", "u", "ɔ", "ə", "ɜr", "ɛ", "ʊ",
    "aɪ", "oʊ", "ɔɪ", "aʊ", "eɪ",
    "k", "p", "t", "b", "d", "g",
    "ʃ", "s", "z", "θ", "ð", "f", "v", "ʒ", "h",
    "tʃ", "dʒ",
    "l", "j", "w", "r",
    "m", "n", "ŋ",
)


@dataclass
class ExtractorConfig:
    backend: str = "spectral"
    recognizer_model: str = "facebook/wav2vec2-lv-60-espeak-cv-ft"
    encoder_model: str = "facebook/wav2vec2-base"
    device: str = "cpu"
    sample_rate: int = 16000
    frame_len: int = 400
    hop: int = 320
    feature_dim: int = 32  # spectral backend only; wav2vec2 dim comes from the model
    inventory: tuple = field(default_factory=lambda: DEFAULT_INVENTORY)

    @classmethod
    def from_file(cls, path) -> "ExtractorConfig":
        values = json.loads(Path(path).read_text("utf-8"))
        if "inventory" in values:
            values["inventory"] = tuple(values["inventory"])
        return cls(**values)


def grid_frame_count(n_samples: int, frame_len: int = 400, hop: int = 320) -> int:
    """Frames covering n_samples: 1 + (n - frame_len) // hop, with a single
    zero-padded frame for clips shorter than one frame."""
    if n_samples <= 0:
        return 0
    if n_samples < frame_len:
        return 1
    return 1 + (n_samples - frame_len) // hop


def make_backend(config: ExtractorConfig):
    if config.backend == "spectral":
        return SpectralBackend(
            n_labels=len(config.inventory),
            dim=config.feature_dim,
            sample_rate=config.sample_rate,
        )
    if config.backend == "wav2vec2":
        return Wav2Vec2Backend(
            recognizer_id=config.recognizer_model,
            encoder_id=config.encoder_model,
            inventory=config.inventory,
            device=config.device,
        )
    raise ValueError(f"unknown backend {config.backend!r}")


def extract_paf_bytes(audio_path, config: ExtractorConfig, backend=None) -> bytes:
    """Run the frame pipeline on one audio file and encode the PAF."""
    samples = load_audio(audio_path)
    n_frames = grid_frame_count(len(samples), config.frame_len, config.hop)
    starts = np.arange(n_frames) * config.hop
    backend = backend or make_backend(config)
    ids, features = backend(samples, starts, config.frame_len)
    if abs(len(ids) - n_frames) > 1 or len(ids) != len(features):
        raise AlignmentError(
            f"backend returned {len(ids)} frames for a {n_frames}-frame grid"
        )
    if len(ids) > n_frames:
        ids, features = ids[:n_frames], features[:n_frames]
    elif len(ids) < n_frames:
        pad = n_frames - len(ids)
        ids = np.concatenate([ids, np.full(pad, NO_PHONEME, dtype=np.uint16)])
        features = np.vstack([features, np.zeros((pad, features.shape[1]),
                                                 dtype=np.float32)])
    return write_paf_bytes(
        phoneme_ids=ids,
        features=features,
        inventory=config.inventory,
        track_id=Path(audio_path).stem,
        sample_rate=config.sample_rate,
        frame_len=config.frame_len,
        hop=config.hop,
    )


def extract_paf(audio_path, out_dir, config: ExtractorConfig, backend=None) -> Path:
    """Extract one file; writes <stem>.paf into out_dir and returns the path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / (Path(audio_path).stem + ".paf")
    target.write_bytes(extract_paf_bytes(audio_path, config, backend=backend))
    return target

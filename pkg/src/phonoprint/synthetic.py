"""Synthetic cluster data for end-to-end validation and demos.

Each synthetic speaker owns one Gaussian cluster per phoneme (unit-norm
center, isotropic noise) plus a silence cluster. Genuine tracks sample
from the speaker's clusters; fake tracks sample from clusters shifted by
a multiple of the cluster standard deviation along a fixed per-phoneme
direction. This gives a controllable, dataset-free separation dial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categories import DEFAULT_INVENTORY
from .paf import NO_PHONEME, PafFile, PhonemeInventory


@dataclass
class ClusterSpeaker:
    """Ground-truth generative model for one synthetic speaker."""

    inventory: PhonemeInventory
    centers: np.ndarray  # (n_phonemes, dim), unit rows
    silence_center: np.ndarray
    shift_directions: np.ndarray  # (n_phonemes, dim), unit rows
    sigma: float


def make_cluster_speaker(
    rng: np.random.Generator,
    labels: tuple[str, ...] = DEFAULT_INVENTORY,
    dim: int = 32,
    sigma: float = 0.05,
    shared_shift: bool = False,
) -> ClusterSpeaker:
    """Draw per-phoneme cluster centers on the unit sphere.

    With shared_shift, all fake clusters move along one common direction
    (a global generation artifact); otherwise each phoneme gets its own.
    """

    def unit_rows(n):
        m = rng.normal(size=(n, dim))
        return m / np.linalg.norm(m, axis=1, keepdims=True)

    if shared_shift:
        shift_directions = np.tile(unit_rows(1), (len(labels), 1))
    else:
        shift_directions = unit_rows(len(labels))
    return ClusterSpeaker(
        inventory=PhonemeInventory(labels),
        centers=unit_rows(len(labels)),
        silence_center=unit_rows(1)[0],
        shift_directions=shift_directions,
        sigma=sigma,
    )


def make_track(
    rng: np.random.Generator,
    speaker: ClusterSpeaker,
    track_id: str,
    n_segments: int = 40,
    frames_per_segment: tuple[int, int] = (1, 3),
    silence_prob: float = 0.3,
    shift: float = 0.0,
    phoneme_subset: np.ndarray | None = None,
    phoneme_sequence: list[int] | None = None,
) -> PafFile:
    """Sample one track as a PAF.

    shift is the fake-cluster displacement in units of sigma (0 generates
    genuine data). Consecutive segments never repeat a phoneme, so the
    frame runs map 1:1 onto phoneme occurrences. phoneme_subset restricts
    which inventory ids may occur; phoneme_sequence pins the exact
    occurrence sequence instead of sampling it.
    """
    dim = speaker.centers.shape[1]
    choices = (
        np.arange(len(speaker.inventory))
        if phoneme_subset is None
        else np.asarray(phoneme_subset)
    )
    ids = []
    feats = []
    prev = -1
    sequence = range(n_segments) if phoneme_sequence is None else phoneme_sequence
    for step in sequence:
        if rng.random() < silence_prob:
            for _ in range(int(rng.integers(1, 3))):
                ids.append(NO_PHONEME)
                feats.append(
                    speaker.silence_center + speaker.sigma * rng.normal(size=dim)
                )
        if phoneme_sequence is None:
            a = int(rng.choice(choices))
            while a == prev:
                a = int(rng.choice(choices))
        else:
            a = int(step)
            if a == prev:
                ids.append(NO_PHONEME)
                feats.append(
                    speaker.silence_center + speaker.sigma * rng.normal(size=dim)
                )
        prev = a
        center = speaker.centers[a] + shift * speaker.sigma * speaker.shift_directions[a]
        for _ in range(int(rng.integers(frames_per_segment[0], frames_per_segment[1] + 1))):
            ids.append(a)
            feats.append(center + speaker.sigma * rng.normal(size=dim))
    return PafFile(
        dim=dim,
        inventory=speaker.inventory,
        phoneme_ids=np.array(ids, dtype=np.uint16),
        features=np.array(feats, dtype=np.float32),
        track_id=track_id,
    )


def make_reference_set(
    rng: np.random.Generator,
    speaker: ClusterSpeaker,
    n_tracks: int,
    **track_kwargs,
) -> list[PafFile]:
    return [
        make_track(rng, speaker, track_id=f"ref-{i:03d}", **track_kwargs)
        for i in range(n_tracks)
    ]


def perturb_silence_features(paf: PafFile, noise_std: float, seed: int) -> PafFile:
    """Add Gaussian noise to the features of NO_PHONEME frames only.

    Feature-space stand-in for acoustic degradations that hit
    non-linguistic regions; phoneme-labeled frames are untouched.
    """
    rng = np.random.default_rng(seed)
    feats = paf.features.astype(np.float64)
    mask = paf.phoneme_ids == NO_PHONEME
    feats[mask] += rng.normal(0.0, noise_std, size=(int(mask.sum()), paf.dim))
    return PafFile(
        dim=paf.dim,
        inventory=paf.inventory,
        phoneme_ids=paf.phoneme_ids.copy(),
        features=feats.astype(np.float32),
        sample_rate=paf.sample_rate,
        frame_len=paf.frame_len,
        hop=paf.hop,
        track_id=paf.track_id,
    )

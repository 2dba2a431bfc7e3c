"""Speaker profiles built from reference PAF tracks.

A profile keeps two views of the same reference material:

* phoneme_entries: for every phoneme the speaker realized, all reference
  embeddings of its occurrences (silence frames never contribute);
* baseline_entries: one whole-track mean embedding per reference track,
  averaged over ALL frames including silence. The asymmetry is deliberate:
  the utterance-level baseline has no notion of non-linguistic frames.

Profiles store raw vectors; normalization happens inside the cosine
distance, not here.

Profile wire format (little-endian):

    magic "POIP" | version u16 (= 1) | dim u32
    speaker_id           u16 length + UTF-8
    n_reference_tracks   u32
    baseline_count       u32, then baseline_count * dim f32
    phoneme_count        u16, then per phoneme:
        label            u16 length + UTF-8
        vector_count     u32, then vector_count * dim f32
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from . import paf as paf_mod
from .errors import (
    BadMagic,
    DimMismatch,
    EmptyReferenceSet,
    InvalidProfile,
    TruncatedFile,
    UnsupportedVersion,
)
from .paf import PafFile, PhonemeInventory, _Reader, _frozen, _pack_string

log = logging.getLogger(__name__)

PROFILE_MAGIC = b"POIP"
PROFILE_VERSION = 1


@dataclass
class EnrollmentConfig:
    """Reference-selection policy for profile construction.

    max_reference_tracks caps how many usable tracks are consumed, in list
    order. min_phoneme_coverage is advisory; enrollment warns when coverage
    falls below it but never fails.
    """

    max_reference_tracks: int = 100
    min_phoneme_coverage: float = 0.0

    def __post_init__(self):
        if self.max_reference_tracks < 1:
            raise ValueError("max_reference_tracks must be >= 1")


@dataclass(eq=False)
class SpeakerProfile:
    """Reference embeddings for one speaker.

    phoneme_entries maps each realized phoneme to a (count, dim) float32
    array, rows in enrollment order. baseline_entries is a
    (n_reference_tracks, dim) float32 array, one row per reference track.
    """

    speaker_id: str
    dim: int
    phoneme_entries: dict[str, np.ndarray]
    baseline_entries: np.ndarray
    n_reference_tracks: int

    def __post_init__(self):
        entries = {}
        for label, vecs in self.phoneme_entries.items():
            arr = np.array(vecs, dtype=np.float32)
            if arr.ndim != 2 or arr.shape[1] != self.dim:
                raise DimMismatch(
                    f"entry {label!r} has shape {arr.shape}, expected (*, {self.dim})"
                )
            if arr.shape[0] == 0:
                raise InvalidProfile(f"entry {label!r} is empty")
            entries[label] = _frozen(arr)
        self.phoneme_entries = entries
        base = np.array(self.baseline_entries, dtype=np.float32)
        if base.ndim != 2 or base.shape[1] != self.dim:
            raise DimMismatch(
                f"baseline entries shape {base.shape}, expected (*, {self.dim})"
            )
        if base.shape[0] != self.n_reference_tracks:
            raise InvalidProfile(
                f"{base.shape[0]} baseline entries for "
                f"{self.n_reference_tracks} reference tracks"
            )
        self.baseline_entries = _frozen(base)

    @property
    def phonemes(self) -> tuple[str, ...]:
        return tuple(self.phoneme_entries)

    def occurrence_count(self, label: str) -> int:
        entry = self.phoneme_entries.get(label)
        return 0 if entry is None else entry.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpeakerProfile):
            return NotImplemented
        return (
            self.speaker_id == other.speaker_id
            and self.dim == other.dim
            and self.n_reference_tracks == other.n_reference_tracks
            and np.array_equal(self.baseline_entries, other.baseline_entries)
            and list(self.phoneme_entries) == list(other.phoneme_entries)
            and all(
                np.array_equal(v, other.phoneme_entries[k])
                for k, v in self.phoneme_entries.items()
            )
        )


def build_profile(
    speaker_id: str,
    reference_pafs: list[PafFile],
    config: EnrollmentConfig | None = None,
) -> SpeakerProfile:
    """Construct a profile from reference tracks, in list order.

    At most config.max_reference_tracks usable tracks are consumed; tracks
    with zero frames are skipped with a warning and do not occupy a slot.
    All tracks must share the feature dimension.
    """
    config = config or EnrollmentConfig()
    if not reference_pafs:
        raise EmptyReferenceSet(f"no reference tracks for speaker {speaker_id!r}")
    dim = reference_pafs[0].dim

    phoneme_entries: dict[str, list[np.ndarray]] = {}
    baselines = []
    used = 0
    skipped = 0
    for i, track in enumerate(reference_pafs):
        if used >= config.max_reference_tracks:
            log.info(
                "speaker %s: reference cap %d reached, ignoring %d remaining tracks",
                speaker_id,
                config.max_reference_tracks,
                len(reference_pafs) - i,
            )
            break
        if track.dim != dim:
            raise DimMismatch(
                f"track {track.track_id!r} has dim {track.dim}, expected {dim}"
            )
        if track.n_frames == 0:
            skipped += 1
            log.warning(
                "speaker %s: skipping zero-frame reference track %r",
                speaker_id,
                track.track_id,
            )
            continue
        for label, vecs in paf_mod.track_phoneme_sets(
            paf_mod.segment_phonemes(track)
        ).items():
            phoneme_entries.setdefault(label, []).extend(vecs)
        baselines.append(
            track.features.astype(np.float64).mean(axis=0).astype(np.float32)
        )
        used += 1
    if skipped:
        log.warning(
            "speaker %s: %d zero-frame reference tracks skipped", speaker_id, skipped
        )
    if used == 0:
        raise EmptyReferenceSet(
            f"no usable reference tracks for speaker {speaker_id!r}"
        )
    return SpeakerProfile(
        speaker_id=speaker_id,
        dim=dim,
        phoneme_entries={k: np.stack(v) for k, v in phoneme_entries.items()},
        baseline_entries=np.stack(baselines),
        n_reference_tracks=used,
    )


def save_profile(profile: SpeakerProfile) -> bytes:
    """Encode to the canonical byte form; deterministic for equal inputs."""
    parts = [
        PROFILE_MAGIC,
        struct.pack("<H", PROFILE_VERSION),
        struct.pack("<I", profile.dim),
        _pack_string(profile.speaker_id, "speaker_id"),
        struct.pack("<I", profile.n_reference_tracks),
        struct.pack("<I", profile.baseline_entries.shape[0]),
        profile.baseline_entries.astype("<f4").tobytes(),
        struct.pack("<H", len(profile.phoneme_entries)),
    ]
    for label, vecs in profile.phoneme_entries.items():
        parts.append(_pack_string(label, "phoneme label"))
        parts.append(struct.pack("<I", vecs.shape[0]))
        parts.append(vecs.astype("<f4").tobytes())
    return b"".join(parts)


def load_profile(data: bytes) -> SpeakerProfile:
    """Decode a profile byte stream; inverse of save_profile."""
    r = _Reader(data)
    magic = r.take(4)
    if magic != PROFILE_MAGIC:
        raise BadMagic(f"expected {PROFILE_MAGIC!r}, got {magic!r}", offset=0)
    version = r.u16()
    if version != PROFILE_VERSION:
        raise UnsupportedVersion(
            f"version {version}, expected {PROFILE_VERSION}", offset=4
        )
    dim = r.u32()
    if dim == 0:
        raise InvalidProfile("dim must be positive", offset=6)
    speaker_id = r.string("speaker_id")
    n_reference_tracks = r.u32()
    baseline_count = r.u32()
    base = np.frombuffer(r.take(baseline_count * dim * 4), dtype="<f4")
    base = base.reshape(baseline_count, dim).copy()
    n_phonemes = r.u16()
    entries: dict[str, np.ndarray] = {}
    for _ in range(n_phonemes):
        label_offset = r.pos
        label = r.string("phoneme label")
        if label in entries:
            raise InvalidProfile(
                f"duplicate phoneme entry {label!r}", offset=label_offset
            )
        count = r.u32()
        if count == 0:
            raise InvalidProfile(f"entry {label!r} is empty", offset=label_offset)
        vecs = np.frombuffer(r.take(count * dim * 4), dtype="<f4")
        entries[label] = vecs.reshape(count, dim).copy()
    r.done()
    try:
        return SpeakerProfile(
            speaker_id=speaker_id,
            dim=dim,
            phoneme_entries=entries,
            baseline_entries=base,
            n_reference_tracks=n_reference_tracks,
        )
    except (DimMismatch, InvalidProfile) as exc:
        raise InvalidProfile(f"inconsistent profile: {exc}") from None


@dataclass
class CoverageReport:
    """How well a profile covers a phoneme inventory."""

    counts: dict[str, int]
    coverage: float
    missing: list[str] = field(default_factory=list)


def profile_coverage(
    profile: SpeakerProfile, inventory: PhonemeInventory
) -> CoverageReport:
    """Per-phoneme occurrence counts plus the covered fraction of inventory.

    An empty inventory is vacuously fully covered (reported with a warning).
    Profile entries outside the inventory still appear in the counts.
    """
    counts = {a: profile.occurrence_count(a) for a in inventory}
    for label in profile.phoneme_entries:
        if label not in counts:
            counts[label] = profile.occurrence_count(label)
    if len(inventory) == 0:
        log.warning(
            "speaker %s: coverage against an empty inventory is vacuous",
            profile.speaker_id,
        )
        return CoverageReport(counts=counts, coverage=1.0, missing=[])
    missing = [a for a in inventory if a not in profile.phoneme_entries]
    coverage = 1.0 - len(missing) / len(inventory)
    return CoverageReport(counts=counts, coverage=coverage, missing=missing)

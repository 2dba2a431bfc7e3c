"""Phoneme-Aligned Features (PAF) container.

A PAF file stores, for one audio track, the per-frame phoneme label and the
per-frame feature vector produced by an upstream extractor. It is the unit
of exchange between feature extraction and everything else in this package.

Wire format (all integers little-endian):

    magic "PAF1"                       4 bytes
    version        u16                 (= 1)
    flags          u16                 (= 0, none defined)
    sample_rate    u32                 Hz
    frame_len      u32                 samples per frame
    hop            u32                 samples between frame starts
    dim            u32                 feature dimension d
    track_id       u16 length + UTF-8
    inventory      u16 count, then per label: u16 length + UTF-8
    frame_count    u64
    frames         per frame: u16 phoneme_id, then d * f32 features

phoneme_id indexes the inventory; 0xFFFF (NO_PHONEME) marks frames with no
phoneme (silence, non-linguistic content). The inventory travels with the
file, so the rest of the package never assumes a particular phoneme set.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import (
    BadMagic,
    DimMismatch,
    FormatError,
    InvalidInventory,
    InvalidPhonemeId,
    TooManyPhonemes,
    TrailingData,
    TruncatedFile,
    UnsupportedVersion,
)

NO_PHONEME = 0xFFFF

MAGIC = b"PAF1"
VERSION = 1

# Default frame geometry: 25 ms frames, 5 ms overlap, 16 kHz.
DEFAULT_SAMPLE_RATE = 16000
DEFAULT_FRAME_LEN = 400
DEFAULT_HOP = 320


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PhonemeInventory:
    """Ordered list of phoneme labels; position is the on-disk phoneme_id."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) >= NO_PHONEME:
            raise TooManyPhonemes(
                f"inventory has {len(self.labels)} labels, limit is {NO_PHONEME - 1}"
            )
        seen = set()
        for label in self.labels:
            if not label:
                raise InvalidInventory("empty phoneme label")
            if label in seen:
                raise InvalidInventory(f"duplicate phoneme label {label!r}")
            seen.add(label)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(self.labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def label_of(self, phoneme_id: int) -> str:
        return self.labels[phoneme_id]

    def id_of(self, label: str) -> int:
        return self._index[label]

    def __contains__(self, label: str) -> bool:
        return label in self._index


class FrameRecord(NamedTuple):
    """One frame: inventory index (or NO_PHONEME) plus its feature vector."""

    phoneme_id: int
    features: np.ndarray


@dataclass(eq=False)
class PafFile:
    """Decoded PAF contents; frames held as parallel arrays.

    phoneme_ids has shape (n,) dtype uint16, features (n, dim) float32.
    Arrays are made read-only on construction; instances are immutable.
    """

    dim: int
    inventory: PhonemeInventory
    phoneme_ids: np.ndarray
    features: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE
    frame_len: int = DEFAULT_FRAME_LEN
    hop: int = DEFAULT_HOP
    track_id: str = ""

    def __post_init__(self):
        if self.dim <= 0:
            raise DimMismatch(f"dim must be positive, got {self.dim}")
        ids = np.array(self.phoneme_ids, dtype=np.uint16)
        feats = np.array(self.features, dtype=np.float32, order="C")
        if feats.size == 0:
            feats = feats.reshape(0, self.dim)
        if feats.ndim != 2 or feats.shape[1] != self.dim:
            raise DimMismatch(
                f"features shape {feats.shape} does not match dim {self.dim}"
            )
        if len(ids) != len(feats):
            raise DimMismatch(
                f"{len(ids)} phoneme ids but {len(feats)} feature rows"
            )
        bad = ids[(ids != NO_PHONEME) & (ids >= len(self.inventory))]
        if bad.size:
            raise InvalidPhonemeId(f"phoneme_id {int(bad[0])} outside inventory")
        self.phoneme_ids = _frozen(ids)
        self.features = _frozen(feats)

    @property
    def n_frames(self) -> int:
        return len(self.phoneme_ids)

    def frame(self, i: int) -> FrameRecord:
        return FrameRecord(int(self.phoneme_ids[i]), self.features[i])

    def duration_seconds(self) -> float:
        """Audio span covered by the frame grid."""
        if self.n_frames == 0:
            return 0.0
        return ((self.n_frames - 1) * self.hop + self.frame_len) / self.sample_rate

    def __eq__(self, other) -> bool:
        if not isinstance(other, PafFile):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.inventory == other.inventory
            and self.sample_rate == other.sample_rate
            and self.frame_len == other.frame_len
            and self.hop == other.hop
            and self.track_id == other.track_id
            and np.array_equal(self.phoneme_ids, other.phoneme_ids)
            and np.array_equal(self.features, other.features)
        )


@dataclass(frozen=True)
class PhonemeSegment:
    """One phoneme occurrence: a maximal run of frames with the same label.

    embedding is the arithmetic mean of the covered frames' feature vectors
    (computed in float64, stored float32). Frame range is closed-open;
    times are the audio span the frames cover.
    """

    phoneme: str
    embedding: np.ndarray
    start_frame: int
    end_frame: int
    start_time: float
    end_time: float

    def __post_init__(self):
        object.__setattr__(
            self, "embedding", _frozen(np.array(self.embedding, dtype=np.float32))
        )


class _Reader:
    """Cursor over a byte buffer; every under-read raises TruncatedFile."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedFile(
                f"need {n} bytes, {len(self.data) - self.pos} left", offset=self.pos
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def string(self, what: str) -> str:
        start = self.pos
        raw = self.take(self.u16())
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(f"{what} is not valid UTF-8", offset=start) from None

    def done(self):
        if self.pos != len(self.data):
            raise TrailingData(
                f"{len(self.data) - self.pos} unexpected trailing bytes",
                offset=self.pos,
            )


def _pack_string(s: str, what: str) -> bytes:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise FormatError(f"{what} longer than 65535 bytes")
    return struct.pack("<H", len(raw)) + raw


def read_paf(data: bytes) -> PafFile:
    """Decode one PAF byte stream.

    Raises BadMagic, UnsupportedVersion, TruncatedFile, TrailingData,
    InvalidInventory, InvalidPhonemeId or DimMismatch; each error reports
    the byte offset at which it was detected.
    """
    r = _Reader(data)
    magic = r.take(4)
    if magic != MAGIC:
        raise BadMagic(f"expected {MAGIC!r}, got {magic!r}", offset=0)
    version = r.u16()
    if version != VERSION:
        raise UnsupportedVersion(f"version {version}, expected {VERSION}", offset=4)
    flags = r.u16()
    if flags != 0:
        raise UnsupportedVersion(f"unknown flags 0x{flags:04x}", offset=6)
    sample_rate = r.u32()
    frame_len = r.u32()
    hop = r.u32()
    dim_offset = r.pos
    dim = r.u32()
    if dim == 0:
        raise DimMismatch(f"dim must be positive (at byte offset {dim_offset})")
    track_id = r.string("track_id")
    inv_offset = r.pos
    n_labels = r.u16()
    labels = [r.string("phoneme label") for _ in range(n_labels)]
    try:
        inventory = PhonemeInventory(tuple(labels))
    except InvalidInventory as exc:
        raise InvalidInventory(str(exc), offset=inv_offset) from None
    frame_count = r.u64()
    frame_bytes = frame_count * (2 + 4 * dim)
    payload_offset = r.pos
    payload = r.take(frame_bytes)
    r.done()

    frame_dtype = np.dtype([("pid", "<u2"), ("feat", "<f4", (dim,))])
    frames = np.frombuffer(payload, dtype=frame_dtype, count=frame_count)
    ids = frames["pid"].copy()
    feats = frames["feat"].reshape(frame_count, dim).copy()
    bad = np.flatnonzero((ids != NO_PHONEME) & (ids >= n_labels))
    if bad.size:
        i = int(bad[0])
        raise InvalidPhonemeId(
            f"frame {i} has phoneme_id {int(ids[i])}, inventory has {n_labels}",
            offset=payload_offset + i * (2 + 4 * dim),
        )
    return PafFile(
        dim=dim,
        inventory=inventory,
        phoneme_ids=ids,
        features=feats,
        sample_rate=sample_rate,
        frame_len=frame_len,
        hop=hop,
        track_id=track_id,
    )


def write_paf(paf: PafFile) -> bytes:
    """Encode to the canonical byte form; deterministic for equal inputs."""
    parts = [
        MAGIC,
        struct.pack("<HH", VERSION, 0),
        struct.pack("<IIII", paf.sample_rate, paf.frame_len, paf.hop, paf.dim),
        _pack_string(paf.track_id, "track_id"),
        struct.pack("<H", len(paf.inventory)),
    ]
    for label in paf.inventory:
        parts.append(_pack_string(label, "phoneme label"))
    parts.append(struct.pack("<Q", paf.n_frames))
    frame_dtype = np.dtype([("pid", "<u2"), ("feat", "<f4", (paf.dim,))])
    frames = np.empty(paf.n_frames, dtype=frame_dtype)
    frames["pid"] = paf.phoneme_ids
    frames["feat"] = paf.features
    parts.append(frames.tobytes())
    return b"".join(parts)


def segment_phonemes(paf: PafFile) -> list[PhonemeSegment]:
    """Merge consecutive same-label frames into phoneme occurrences.

    NO_PHONEME frames are discarded. A label change always starts a new
    segment, so repeated realizations of the same phoneme stay separate.
    Returned segments are ordered by start frame.
    """
    ids = paf.phoneme_ids
    if len(ids) == 0:
        return []
    changes = np.flatnonzero(ids[1:] != ids[:-1]) + 1
    starts = np.concatenate(([0], changes))
    ends = np.concatenate((changes, [len(ids)]))
    feats64 = paf.features.astype(np.float64)
    segments = []
    for s, e in zip(starts, ends):
        pid = int(ids[s])
        if pid == NO_PHONEME:
            continue
        segments.append(
            PhonemeSegment(
                phoneme=paf.inventory.label_of(pid),
                embedding=feats64[s:e].mean(axis=0),
                start_frame=int(s),
                end_frame=int(e),
                start_time=s * paf.hop / paf.sample_rate,
                end_time=((e - 1) * paf.hop + paf.frame_len) / paf.sample_rate,
            )
        )
    return segments


def track_phoneme_sets(segments: list[PhonemeSegment]) -> dict[str, list[np.ndarray]]:
    """Group one track's segment embeddings by phoneme, keeping occurrence order."""
    sets: dict[str, list[np.ndarray]] = {}
    for seg in segments:
        sets.setdefault(seg.phoneme, []).append(seg.embedding)
    return sets

"""PAF writer: the byte-level contract between this frontend and the core.

Wire format (little-endian):

    magic "PAF1" | version u16 (=1) | flags u16 (=0)
    sample_rate u32 | frame_len u32 | hop u32 | dim u32
    track_id: u16 length + UTF-8
    inventory: u16 count, then per label u16 length + UTF-8
    frame_count u64
    frames: per frame u16 phoneme_id, then dim * f32 features

phoneme_id 0xFFFF (NO_PHONEME) marks frames without a phoneme.
"""

import struct

import numpy as np

NO_PHONEME = 0xFFFF
MAGIC = b"PAF1"
VERSION = 1


def _string(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def write_paf_bytes(
    phoneme_ids,
    features,
    inventory,
    track_id: str,
    sample_rate: int = 16000,
    frame_len: int = 400,
    hop: int = 320,
) -> bytes:
    ids = np.ascontiguousarray(phoneme_ids, dtype="<u2")
    feats = np.ascontiguousarray(features, dtype="<f4")
    if feats.ndim != 2 or len(ids) != len(feats):
        raise ValueError(
            f"features shape {feats.shape} inconsistent with {len(ids)} ids"
        )
    dim = feats.shape[1]
    bad = ids[(ids != NO_PHONEME) & (ids >= len(inventory))]
    if bad.size:
        raise ValueError(f"phoneme_id {int(bad[0])} outside inventory")
    parts = [
        MAGIC,
        struct.pack("<HH", VERSION, 0),
        struct.pack("<IIII", sample_rate, frame_len, hop, dim),
        _string(track_id),
        struct.pack("<H", len(inventory)),
    ]
    parts.extend(_string(label) for label in inventory)
    parts.append(struct.pack("<Q", len(ids)))
    frame_dtype = np.dtype([("pid", "<u2"), ("feat", "<f4", (dim,))])
    frames = np.empty(len(ids), dtype=frame_dtype)
    frames["pid"] = ids
    frames["feat"] = feats
    parts.append(frames.tobytes())
    return b"".join(parts)

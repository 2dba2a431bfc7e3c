"""Distance scoring of test tracks against speaker profiles.

Two modes share one convention: higher score means more likely fake.

* phoneme mode: every phoneme occurrence is matched against the profile
  entry for its label by minimum cosine distance; the track score is the
  mean over scored occurrences. Occurrences whose label the speaker never
  realized in the references are skipped (never scored against an empty
  entry) and surfaced so coverage gaps stay visible.
* baseline mode: the whole-track mean embedding is matched against the
  per-track reference embeddings, again by minimum cosine distance.

All distances are computed in double precision regardless of how vectors
are stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .categories import ALL_CATEGORY_NAME, PhonemeCategory
from .errors import (
    EmptyEntry,
    EmptyTrack,
    EmptyReferenceSet,
    NoScorablePhonemes,
    WrongMode,
    ZeroVector,
)
from .paf import PafFile, PhonemeSegment
from .profile import SpeakerProfile

PHONEME_MODE = "phoneme"
BASELINE_MODE = "baseline"

_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class PhonemeDistance:
    """Distance of one occurrence to its best-matching reference vector."""

    segment: PhonemeSegment
    distance: float
    matched_reference_index: int


@dataclass
class TrackScore:
    """Decision score for one track; higher means more likely fake."""

    track_id: str
    mode: str
    score: float
    per_phoneme: list[PhonemeDistance] = field(default_factory=list)
    n_phonemes: int = 0
    skipped_phonemes: list[PhonemeSegment] = field(default_factory=list)


def cosine_distance(u, v) -> float:
    """1 - cos(u, v), in [0, 2].

    Bit-identical vectors return exactly 0.0, so a track scored against a
    profile containing its own embeddings cancels exactly. Raises
    ZeroVector when either norm is below 1e-12.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu < _NORM_FLOOR or nv < _NORM_FLOOR:
        raise ZeroVector(f"vector norms {nu:.3e}, {nv:.3e} below {_NORM_FLOOR}")
    if u.shape == v.shape and np.array_equal(u, v):
        return 0.0
    d = 1.0 - float(np.dot(u, v)) / (nu * nv)
    return min(max(d, 0.0), 2.0)


def phoneme_min_distance(f, entry) -> tuple[float, int]:
    """Minimum cosine distance from f to any vector in entry.

    Ties break toward the lowest index. Returns (distance, argmin index).
    """
    entry = np.asarray(entry, dtype=np.float64)
    if entry.ndim != 2 or entry.shape[0] == 0:
        raise EmptyEntry("profile entry holds no reference vectors")
    f = np.asarray(f, dtype=np.float64)
    nf = np.linalg.norm(f)
    norms = np.linalg.norm(entry, axis=1)
    if nf < _NORM_FLOOR or norms.min() < _NORM_FLOOR:
        raise ZeroVector("zero vector in min-distance computation")
    dists = 1.0 - (entry @ f) / (norms * nf)
    np.clip(dists, 0.0, 2.0, out=dists)
    exact = np.flatnonzero((entry == f).all(axis=1))
    if exact.size:
        dists[exact] = 0.0
    idx = int(np.argmin(dists))
    return float(dists[idx]), idx


def score_track_phoneme(
    segments: list[PhonemeSegment],
    profile: SpeakerProfile,
    track_id: str = "",
) -> TrackScore:
    """Mean of per-occurrence minimum cosine distances.

    Occurrences with labels absent from the profile are collected in
    skipped_phonemes and excluded from the mean. Raises NoScorablePhonemes
    when nothing is scorable.
    """
    per_phoneme = []
    skipped = []
    for seg in segments:
        entry = profile.phoneme_entries.get(seg.phoneme)
        if entry is None:
            skipped.append(seg)
            continue
        dist, idx = phoneme_min_distance(seg.embedding, entry)
        per_phoneme.append(
            PhonemeDistance(segment=seg, distance=dist, matched_reference_index=idx)
        )
    if not per_phoneme:
        raise NoScorablePhonemes(
            f"track {track_id!r}: none of {len(segments)} occurrences has a "
            f"label present in the profile"
        )
    score = float(np.mean([pd.distance for pd in per_phoneme]))
    return TrackScore(
        track_id=track_id,
        mode=PHONEME_MODE,
        score=score,
        per_phoneme=per_phoneme,
        n_phonemes=len(per_phoneme),
        skipped_phonemes=skipped,
    )


def baseline_track_embedding(paf: PafFile) -> np.ndarray:
    """Mean feature vector over all frames, silence included."""
    if paf.n_frames == 0:
        raise EmptyTrack(f"track {paf.track_id!r} has no frames")
    return paf.features.astype(np.float64).mean(axis=0).astype(np.float32)


def score_track_baseline(paf: PafFile, profile: SpeakerProfile) -> TrackScore:
    """Minimum cosine distance from the track embedding to any reference track."""
    if profile.baseline_entries.shape[0] == 0:
        raise EmptyReferenceSet(
            f"profile {profile.speaker_id!r} has no baseline entries"
        )
    f_x = baseline_track_embedding(paf)
    dist, _ = phoneme_min_distance(f_x, profile.baseline_entries)
    return TrackScore(track_id=paf.track_id, mode=BASELINE_MODE, score=dist)


def score_track_category(
    segments: list[PhonemeSegment],
    profile: SpeakerProfile,
    category: PhonemeCategory,
    track_id: str = "",
) -> TrackScore:
    """Phoneme-mode score restricted to occurrences in one category.

    "All" applies no filter, so labels outside every category remain
    scorable under it. Raises NoScorablePhonemes when the track has no
    scorable occurrence in the category; callers must record the track as
    unscorable for that category rather than defaulting a score.
    """
    if category.name == ALL_CATEGORY_NAME:
        filtered = segments
    else:
        filtered = [seg for seg in segments if seg.phoneme in category]
    if not filtered:
        raise NoScorablePhonemes(
            f"track {track_id!r} has no occurrences in category {category.name}"
        )
    return score_track_phoneme(filtered, profile, track_id=track_id)


@dataclass
class PhonemeReport:
    """Per-occurrence breakdown of a phoneme-mode score.

    occurrences are time-ordered; phoneme_means aggregates occurrences of
    the same label (label, mean distance, count), sorted by mean distance
    descending.
    """

    track_id: str
    occurrences: list[PhonemeDistance]
    phoneme_means: list[tuple[str, float, int]]

    def top(self, k: int) -> list[tuple[str, float, int]]:
        return self.phoneme_means[:k]


def per_phoneme_report(score: TrackScore) -> PhonemeReport:
    """Interpretability view of a phoneme-mode TrackScore."""
    if score.mode != PHONEME_MODE:
        raise WrongMode(f"per-phoneme report needs phoneme mode, got {score.mode}")
    occurrences = sorted(score.per_phoneme, key=lambda pd: pd.segment.start_frame)
    by_label: dict[str, list[float]] = {}
    for pd in occurrences:
        by_label.setdefault(pd.segment.phoneme, []).append(pd.distance)
    means = [
        (label, float(np.mean(dists)), len(dists))
        for label, dists in by_label.items()
    ]
    means.sort(key=lambda t: (-t[1], t[0]))
    return PhonemeReport(
        track_id=score.track_id, occurrences=occurrences, phoneme_means=means
    )


REPORT_FIELDS = ("track_id", "phoneme", "start_time", "end_time", "distance")


def render_report(report: PhonemeReport) -> str:
    """Serialize a report as tab-separated records for downstream plotting."""
    lines = ["\t".join(REPORT_FIELDS)]
    for pd in report.occurrences:
        seg = pd.segment
        lines.append(
            "\t".join(
                (
                    report.track_id,
                    seg.phoneme,
                    f"{seg.start_time:.6f}",
                    f"{seg.end_time:.6f}",
                    f"{pd.distance:.9f}",
                )
            )
        )
    return "\n".join(lines) + "\n"

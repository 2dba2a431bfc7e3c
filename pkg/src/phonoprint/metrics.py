"""ROC / AUC / EER evaluation over labeled score sets.

Conventions, fixed because tie handling moves the numbers on small sets:
a track is classified fake iff its score >= threshold; the ROC sweep runs
over the unique scores in descending order; EER is found by linear
interpolation between adjacent sweep points of (FPR - FNR), where
FPR = fraction of bona fide tracks with score >= t and FNR = fraction of
fakes with score < t.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoValidSpeaker, OneClassOnly

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledScore:
    """One scored track: label 0 is bona fide, 1 is fake."""

    score: float
    label: int
    speaker_id: str = ""
    track_id: str = ""

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if not math.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score!r}")


def _split(scores) -> tuple[np.ndarray, np.ndarray]:
    real = np.array([s.score for s in scores if s.label == 0], dtype=np.float64)
    fake = np.array([s.score for s in scores if s.label == 1], dtype=np.float64)
    if len(real) == 0 or len(fake) == 0:
        raise OneClassOnly(
            f"need both classes, got {len(real)} bona fide and {len(fake)} fake"
        )
    return real, fake


def _sweep(real: np.ndarray, fake: np.ndarray):
    """FPR/FNR/TPR at every unique threshold, descending; includes the
    above-everything start point (FPR 0, FNR 1). Rates are computed from
    counts directly so they match exhaustive counting bit-for-bit."""
    thresholds = np.unique(np.concatenate((real, fake)))[::-1]
    real_sorted = np.sort(real)
    fake_sorted = np.sort(fake)
    n_ge_real = len(real) - np.searchsorted(real_sorted, thresholds, side="left")
    n_lt_fake = np.searchsorted(fake_sorted, thresholds, side="left")
    fpr = np.concatenate(([0.0], n_ge_real / len(real)))
    fnr = np.concatenate(([1.0], n_lt_fake / len(fake)))
    tpr = np.concatenate(([0.0], (len(fake) - n_lt_fake) / len(fake)))
    return fpr, fnr, tpr


def roc_curve(scores) -> list[tuple[float, float]]:
    """ROC point set from the descending threshold sweep, deduplicated.

    Starts at (0, 0) and ends at (1, 1); both coordinates are monotone
    non-decreasing. Raises OneClassOnly.
    """
    real, fake = _split(scores)
    fpr, _fnr, tpr = _sweep(real, fake)
    points = []
    for x, y in zip(fpr, tpr):
        p = (float(x), float(y))
        if not points or points[-1] != p:
            points.append(p)
    return points


def auc(roc_points) -> float:
    """Trapezoidal area under the ROC curve.

    Equals the pairwise statistic P(fake > real) + P(fake = real) / 2.
    """
    xs = np.array([p[0] for p in roc_points], dtype=np.float64)
    ys = np.array([p[1] for p in roc_points], dtype=np.float64)
    return float(np.sum((xs[1:] - xs[:-1]) * (ys[1:] + ys[:-1]) / 2.0))


def eer(scores) -> float:
    """Equal error rate: the operating point where FPR = FNR.

    Linear interpolation between the adjacent sweep points where
    (FPR - FNR) changes sign. Raises OneClassOnly.
    """
    real, fake = _split(scores)
    fpr, fnr, _tpr = _sweep(real, fake)
    diff = fpr - fnr
    # diff is non-decreasing from -1 and reaches fpr=1, fnr=0 at the lowest
    # threshold, so a sign change always exists.
    k = int(np.argmax(diff >= 0.0))
    if diff[k] == 0.0:
        return float(fpr[k])
    lam = -diff[k - 1] / (diff[k] - diff[k - 1])
    return float(fpr[k - 1] + lam * (fpr[k] - fpr[k - 1]))


def delta_eer(clean_scores, perturbed_scores) -> float:
    """EER(perturbed) - EER(clean), in percentage points.

    Negative values are meaningful: a perturbation can sharpen detection.
    """
    return (eer(perturbed_scores) - eer(clean_scores)) * 100.0


@dataclass
class EvalReport:
    """Pooled and per-speaker detection metrics.

    auc/eer are pooled over all scores; mean_auc/mean_eer are unweighted
    means over speakers having both classes (None when per-speaker metrics
    were not computable). roc_points is the pooled curve.
    """

    auc: float
    eer: float
    roc_points: list[tuple[float, float]]
    per_speaker: dict[str, tuple[float, float]] = field(default_factory=dict)
    mean_auc: float | None = None
    mean_eer: float | None = None
    excluded_speakers: list[str] = field(default_factory=list)

    def headline(self, aggregation: str = "pooled") -> tuple[float, float]:
        """(auc, eer) under the requested aggregation."""
        if aggregation == "pooled":
            return self.auc, self.eer
        if aggregation == "speaker-mean":
            if self.mean_auc is None or self.mean_eer is None:
                raise NoValidSpeaker("speaker-averaged metrics unavailable")
            return self.mean_auc, self.mean_eer
        raise ValueError(f"unknown aggregation {aggregation!r}")


def per_speaker_aggregate(scores) -> EvalReport:
    """Pooled metrics plus per-speaker AUC/EER and their unweighted means.

    Speakers represented by a single class are excluded from the averages
    and listed in excluded_speakers. Raises NoValidSpeaker when no speaker
    has both classes.
    """
    points = roc_curve(scores)
    report = EvalReport(auc=auc(points), eer=eer(scores), roc_points=points)
    by_speaker: dict[str, list[LabeledScore]] = {}
    for s in scores:
        by_speaker.setdefault(s.speaker_id, []).append(s)
    for speaker in sorted(by_speaker):
        group = by_speaker[speaker]
        labels = {s.label for s in group}
        if labels != {0, 1}:
            report.excluded_speakers.append(speaker)
            log.warning(
                "speaker %s has only label %s tracks; excluded from averages",
                speaker,
                labels,
            )
            continue
        report.per_speaker[speaker] = (auc(roc_curve(group)), eer(group))
    if not report.per_speaker:
        raise NoValidSpeaker("no speaker has scores from both classes")
    report.mean_auc = float(np.mean([m[0] for m in report.per_speaker.values()]))
    report.mean_eer = float(np.mean([m[1] for m in report.per_speaker.values()]))
    return report


def render_eval_report(report: EvalReport, aggregation: str = "pooled") -> str:
    """Stable text rendering (metrics, per-speaker table, ROC points)."""
    lines = ["# metrics"]
    lines.append(f"aggregation\t{aggregation}")
    head_auc, head_eer = report.headline(aggregation)
    lines.append(f"auc\t{head_auc:.6f}")
    lines.append(f"eer\t{head_eer:.6f}")
    lines.append(f"pooled_auc\t{report.auc:.6f}")
    lines.append(f"pooled_eer\t{report.eer:.6f}")
    if report.mean_auc is not None:
        lines.append(f"speaker_mean_auc\t{report.mean_auc:.6f}")
        lines.append(f"speaker_mean_eer\t{report.mean_eer:.6f}")
    if report.per_speaker:
        lines.append("# per-speaker")
        lines.append("speaker_id\tauc\teer")
        for speaker, (a, e) in report.per_speaker.items():
            lines.append(f"{speaker}\t{a:.6f}\t{e:.6f}")
    if report.excluded_speakers:
        lines.append("# excluded (single-class) speakers")
        for speaker in report.excluded_speakers:
            lines.append(speaker)
    lines.append("# roc")
    lines.append("fpr\ttpr")
    for x, y in report.roc_points:
        lines.append(f"{x:.6f}\t{y:.6f}")
    return "\n".join(lines) + "\n"

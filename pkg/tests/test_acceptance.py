"""Acceptance suite: one test per release criterion.

Each test prints a [PASS]/[FAIL] line (run with -s to see them inline).
Tolerances are pinned here and nowhere else.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from phonoprint import (
    ALL_CATEGORY,
    CATEGORIES,
    AudioTrack,
    LabeledScore,
    add_awgn,
    auc,
    build_profile,
    cosine_distance,
    eer,
    load_profile,
    measure_snr,
    mulaw_roundtrip,
    phoneme_min_distance,
    read_paf,
    roc_curve,
    save_profile,
    score_track_baseline,
    score_track_category,
    score_track_phoneme,
    segment_phonemes,
    write_paf,
    write_wav,
)
from phonoprint import synthetic as syn
from phonoprint.errors import FormatError

from conftest import random_paf


@contextmanager
def criterion(name):
    t0 = time.time()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name} ({time.time() - t0:.1f}s)")
        raise
    print(f"[PASS] {name} ({time.time() - t0:.1f}s)")


def fsum_cosine(u, v):
    dot = math.fsum(a * b for a, b in zip(u, v))
    nu = math.sqrt(math.fsum(a * a for a in u))
    nv = math.sqrt(math.fsum(b * b for b in v))
    return 1.0 - dot / (nu * nv)


def test_distance_kernel_oracle_suite():
    with criterion("distance-kernel oracle suite (1000 instances, <10s)"):
        start = time.time()
        rng = np.random.default_rng(1001)
        for case in range(1000):
            d = int(rng.integers(1, 65))
            size = max(1, int(10 ** rng.uniform(0, 3)))
            if case < 3:
                d, size = 64, 1000  # pin a few instances at the caps
            entry = rng.normal(size=(size, d))
            f = rng.normal(size=d)
            f_list = f.tolist()

            got_dist, got_idx = phoneme_min_distance(f, entry)
            best, best_i = None, None
            for i, row in enumerate(entry.tolist()):
                dist = fsum_cosine(f_list, row)
                if best is None or dist < best:
                    best, best_i = dist, i
            assert abs(got_dist - best) < 1e-9
            assert got_idx == best_i or abs(
                fsum_cosine(f_list, entry[got_idx].tolist()) - best
            ) < 1e-9

            probe = entry[int(rng.integers(0, size))]
            single = cosine_distance(f, probe)
            assert abs(single - fsum_cosine(f_list, probe.tolist())) < 1e-9

            # range and scale invariance on every instance
            assert 0.0 <= got_dist <= 2.0 + 1e-9
            assert 0.0 <= single <= 2.0 + 1e-9
            alpha, beta = rng.uniform(0.01, 100, size=2)
            assert abs(
                cosine_distance(alpha * f, beta * probe) - single
            ) < 1e-9
        elapsed = time.time() - start
        assert elapsed < 10.0, f"oracle suite took {elapsed:.1f}s"


def test_self_enrollment_zero():
    with criterion("self-enrollment scores exactly 0.0 (20 speakers, both modes)"):
        rng = np.random.default_rng(2002)
        for s in range(20):
            spk = syn.make_cluster_speaker(rng, dim=16, sigma=0.08)
            refs = syn.make_reference_set(rng, spk, 5, n_segments=25)
            prof = build_profile(f"spk{s}", refs)
            for track in refs:
                phon = score_track_phoneme(
                    segment_phonemes(track), prof, track_id=track.track_id
                )
                base = score_track_baseline(track, prof)
                assert phon.score == 0.0
                assert base.score == 0.0


def _cluster_eer(shift, seed):
    rng = np.random.default_rng(seed)
    spk = syn.make_cluster_speaker(rng, dim=32, sigma=0.05)
    assert len(spk.inventory) == 40
    prof = build_profile(
        "spk", syn.make_reference_set(rng, spk, 30, n_segments=60)
    )
    scores = []
    for i in range(200):
        fake = i >= 100
        track = syn.make_track(
            rng, spk, f"t{i}", n_segments=40, shift=shift if fake else 0.0
        )
        ts = score_track_phoneme(segment_phonemes(track), prof, track_id=track.track_id)
        scores.append(LabeledScore(ts.score, int(fake)))
    return eer(scores)


def test_synthetic_end_to_end_separation():
    with criterion(
        "synthetic separation: EER<=0.02 at 3-sigma shift, ~0.5 at zero shift, <30s"
    ):
        start = time.time()
        assert _cluster_eer(shift=3.0, seed=3003) <= 0.02
        e0 = _cluster_eer(shift=0.0, seed=3004)
        assert 0.4 <= e0 <= 0.6
        elapsed = time.time() - start
        assert elapsed < 30.0, f"separation test took {elapsed:.1f}s"


def test_metrics_oracle():
    with criterion("metrics oracle: pairwise AUC (1e-12), exhaustive EER, worked example"):
        rng = np.random.default_rng(4004)
        for _ in range(100):
            n_r = int(rng.integers(1, 60))
            n_f = int(rng.integers(1, 60))
            reals = np.round(rng.normal(size=n_r), 1).tolist()
            fakes = np.round(rng.normal(0.4, size=n_f), 1).tolist()
            scores = [LabeledScore(s, 0) for s in reals] + [
                LabeledScore(s, 1) for s in fakes
            ]

            pair_auc = sum(
                1.0 if f > r else 0.5 if f == r else 0.0
                for f in fakes
                for r in reals
            ) / (n_r * n_f)
            assert abs(auc(roc_curve(scores)) - pair_auc) < 1e-12

            sweep = [(0.0, 1.0)]
            for t in sorted(set(reals) | set(fakes), reverse=True):
                fpr = sum(1 for s in reals if s >= t) / n_r
                fnr = sum(1 for s in fakes if s < t) / n_f
                sweep.append((fpr, fnr))
            expected = None
            prev = sweep[0]
            for fpr, fnr in sweep[1:]:
                if fpr - fnr >= 0:
                    if fpr == fnr:
                        expected = fpr
                    else:
                        pd = prev[0] - prev[1]
                        lam = -pd / ((fpr - fnr) - pd)
                        expected = prev[0] + lam * (fpr - prev[0])
                    break
                prev = (fpr, fnr)
            assert abs(eer(scores) - expected) < 1e-12

        worked = [LabeledScore(s, 0) for s in (0.1, 0.2, 0.3, 0.4)] + [
            LabeledScore(s, 1) for s in (0.35, 0.5, 0.6, 0.7)
        ]
        assert abs(auc(roc_curve(worked)) - 0.9375) < 1e-12
        assert abs(eer(worked) - 0.25) < 1e-12


def test_perturbation_accuracy():
    with criterion(
        "perturbations: AWGN within 0.1 dB, mu-law sine SNR>30dB, seed-determinism"
    ):
        rng = np.random.default_rng(5005)
        clean = AudioTrack(samples=0.3 * rng.normal(size=160000))
        for snr_db in (25.0, 20.0, 15.0, 10.0):
            noisy = add_awgn(clean, snr_db, seed=50 + int(snr_db))
            assert abs(measure_snr(clean, noisy) - snr_db) <= 0.1

        t = np.arange(16000) / 16000.0
        sine = AudioTrack(samples=np.sin(2 * np.pi * 440 * t))
        assert measure_snr(sine, mulaw_roundtrip(sine)) > 30.0

        wav_a = write_wav(add_awgn(clean, 20.0, seed=7))
        wav_b = write_wav(add_awgn(clean, 20.0, seed=7))
        assert wav_a == wav_b
        assert write_wav(mulaw_roundtrip(sine)) == write_wav(mulaw_roundtrip(sine))


def test_format_round_trips_and_fuzzed_truncations():
    with criterion(
        "format round-trips bit-identical (100 each), truncations always parse errors"
    ):
        rng = np.random.default_rng(6006)
        paf_samples = []
        for _ in range(100):
            f = random_paf(
                rng,
                n_frames=int(rng.integers(0, 60)),
                dim=int(rng.integers(1, 16)),
                track_id=f"t{rng.integers(1e6)}",
            )
            b = write_paf(f)
            assert write_paf(read_paf(b)) == b
            paf_samples.append(b)

        profile_samples = []
        for _ in range(100):
            refs = [
                random_paf(rng, n_frames=int(rng.integers(3, 30)), dim=5)
                for _ in range(int(rng.integers(1, 5)))
            ]
            p = build_profile("spk", refs)
            b = save_profile(p)
            assert save_profile(load_profile(b)) == b
            profile_samples.append(b)

        for b in paf_samples[:5]:
            for n in range(len(b)):
                with pytest.raises(FormatError):
                    read_paf(b[:n])
        for b in profile_samples[:5]:
            for n in range(len(b)):
                with pytest.raises(FormatError):
                    load_profile(b[:n])


def test_category_partition():
    with criterion("category partition: 7 category counts sum to All; filter oracle"):
        rng = np.random.default_rng(7007)
        spk = syn.make_cluster_speaker(rng, dim=12, sigma=0.1)
        # leave some phonemes out of the profile to exercise skip paths
        refs = syn.make_reference_set(
            rng, spk, 6, n_segments=50, phoneme_subset=np.arange(30)
        )
        prof = build_profile("spk", refs)
        names = [n for n in CATEGORIES if n != "All"]
        for i in range(20):
            track = syn.make_track(rng, spk, f"t{i}", n_segments=60)
            segments = segment_phonemes(track)
            all_score = score_track_category(segments, prof, ALL_CATEGORY)
            total = 0
            for name in names:
                cat = CATEGORIES[name]
                subset = [s for s in segments if s.phoneme in cat]
                if not any(s.phoneme in prof.phoneme_entries for s in subset):
                    continue
                got = score_track_category(segments, prof, cat, track_id=f"t{i}")
                oracle = score_track_phoneme(subset, prof, track_id=f"t{i}")
                assert got.score == oracle.score
                assert got.n_phonemes == oracle.n_phonemes
                total += got.n_phonemes
            assert total == all_score.n_phonemes


def test_robustness_direction_synthetic():
    with criterion(
        "robustness direction: baseline dEER > phoneme dEER >= 0 under silence noise"
    ):
        rng = np.random.default_rng(8008)
        spk = syn.make_cluster_speaker(rng, dim=32, sigma=0.05, shared_shift=True)
        refs = syn.make_reference_set(rng, spk, 30, n_segments=60, silence_prob=0.4)
        prof = build_profile("spk", refs)

        sequence = list(rng.integers(0, 40, size=40))
        tracks, labels = [], []
        for i in range(200):
            fake = i >= 100
            tracks.append(
                syn.make_track(
                    rng,
                    spk,
                    f"t{i}",
                    shift=1.5 if fake else 0.0,
                    silence_prob=0.4,
                    phoneme_sequence=sequence,
                )
            )
            labels.append(int(fake))
        perturbed = [
            syn.perturb_silence_features(t, noise_std=0.5, seed=9000 + i)
            for i, t in enumerate(tracks)
        ]

        def eer_of(track_list, mode):
            scores = []
            for track, y in zip(track_list, labels):
                if mode == "phoneme":
                    ts = score_track_phoneme(
                        segment_phonemes(track), prof, track_id=track.track_id
                    )
                else:
                    ts = score_track_baseline(track, prof)
                scores.append(LabeledScore(ts.score, y))
            return eer(scores)

        phoneme_delta = eer_of(perturbed, "phoneme") - eer_of(tracks, "phoneme")
        baseline_delta = eer_of(perturbed, "baseline") - eer_of(tracks, "baseline")
        assert phoneme_delta >= 0.0
        assert baseline_delta > phoneme_delta

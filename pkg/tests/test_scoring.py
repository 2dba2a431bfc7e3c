import math

import numpy as np
import pytest

from phonoprint import (
    ALL_CATEGORY,
    CATEGORIES,
    BASELINE_MODE,
    PHONEME_MODE,
    baseline_track_embedding,
    build_profile,
    cosine_distance,
    parse_categories,
    per_phoneme_report,
    phoneme_min_distance,
    render_report,
    score_track_baseline,
    score_track_category,
    score_track_phoneme,
    segment_phonemes,
)
from phonoprint.profile import SpeakerProfile
from phonoprint.errors import (
    EmptyEntry,
    EmptyReferenceSet,
    EmptyTrack,
    NoScorablePhonemes,
    WrongMode,
    ZeroVector,
)

from conftest import paf_from_labels, random_paf


def brute_force_cosine(u, v):
    dot = math.fsum(float(a) * float(b) for a, b in zip(u, v))
    nu = math.sqrt(math.fsum(float(a) ** 2 for a in u))
    nv = math.sqrt(math.fsum(float(b) ** 2 for b in v))
    return 1.0 - dot / (nu * nv)


def brute_force_min(f, entry):
    best, best_i = None, None
    for i, vec in enumerate(entry):
        d = brute_force_cosine(f, vec)
        if best is None or d < best - 1e-15:
            best, best_i = d, i
    return best, best_i


class TestCosineDistance:
    def test_identical_is_exactly_zero(self, rng):
        v = rng.normal(size=16)
        assert cosine_distance(v, v) == 0.0
        assert cosine_distance(v, v.copy()) == 0.0

    def test_orthogonal(self):
        assert cosine_distance([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_opposite(self):
        assert cosine_distance([2.0, 0.0], [-3.0, 0.0]) == 2.0

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cosine_distance([0.0, 0.0], [1.0, 0.0])
        with pytest.raises(ZeroVector):
            cosine_distance([1.0, 0.0], [1e-13, 0.0])

    def test_matches_brute_force(self, rng):
        for _ in range(100):
            d = int(rng.integers(1, 32))
            u, v = rng.normal(size=d), rng.normal(size=d)
            assert cosine_distance(u, v) == pytest.approx(
                brute_force_cosine(u, v), abs=1e-9
            )

    def test_scale_invariance(self, rng):
        for _ in range(50):
            u, v = rng.normal(size=8), rng.normal(size=8)
            a, b = rng.uniform(0.01, 100, size=2)
            assert cosine_distance(a * u, b * v) == pytest.approx(
                cosine_distance(u, v), abs=1e-9
            )

    def test_range(self, rng):
        for _ in range(200):
            u, v = rng.normal(size=4), rng.normal(size=4)
            assert 0.0 <= cosine_distance(u, v) <= 2.0


class TestPhonemeMinDistance:
    def test_self_in_entry(self, rng):
        entry = rng.normal(size=(10, 6))
        dist, idx = phoneme_min_distance(entry[4], entry)
        assert dist == 0.0
        assert idx == 4

    def test_two_axis_vectors(self):
        dist, idx = phoneme_min_distance([1.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])
        assert dist == 0.0 and idx == 0

    def test_worked_example(self):
        s = 1 / math.sqrt(2)
        entry = [[1.0, 0.0], [s, s]]
        dist, idx = phoneme_min_distance([0.0, 1.0], entry)
        assert dist == pytest.approx(1 - s, abs=1e-9)  # 0.29289...
        assert idx == 1

    def test_tie_breaks_to_lowest_index(self):
        entry = [[2.0, 0.0], [3.0, 0.0]]  # same direction, both distance 0
        dist, idx = phoneme_min_distance([1.0, 0.0], entry)
        assert dist == 0.0 and idx == 0

    def test_empty_entry(self):
        with pytest.raises(EmptyEntry):
            phoneme_min_distance([1.0], np.zeros((0, 1)))

    def test_matches_brute_force(self, rng):
        for _ in range(30):
            d = int(rng.integers(2, 16))
            entry = rng.normal(size=(int(rng.integers(1, 50)), d))
            f = rng.normal(size=d)
            dist, idx = phoneme_min_distance(f, entry)
            exp_dist, exp_idx = brute_force_min(f, entry)
            assert dist == pytest.approx(exp_dist, abs=1e-9)
            assert idx == exp_idx


def profile_from(entries, baselines=None, dim=2):
    baselines = baselines if baselines is not None else np.ones((1, dim))
    return SpeakerProfile(
        speaker_id="s",
        dim=dim,
        phoneme_entries={k: np.asarray(v, dtype=np.float32) for k, v in entries.items()},
        baseline_entries=np.asarray(baselines, dtype=np.float32),
        n_reference_tracks=len(baselines),
    )


class TestScoreTrackPhoneme:
    def test_mean_of_one(self):
        prof = profile_from({"a": [[1.0, 0.0]]})
        f = paf_from_labels(["a"], [[0.0, 1.0]])
        ts = score_track_phoneme(segment_phonemes(f), prof, track_id="t")
        assert ts.score == 1.0
        assert ts.mode == PHONEME_MODE
        assert ts.n_phonemes == 1
        assert ts.per_phoneme[0].matched_reference_index == 0

    def test_arithmetic_mean(self):
        s = 1 / math.sqrt(2)
        prof = profile_from({"a": [[1.0, 0.0]], "b": [[1.0, 0.0]]})
        f = paf_from_labels(["a", None, "b"], [[0.0, 1.0], [9, 9], [s, s]])
        ts = score_track_phoneme(segment_phonemes(f), prof)
        assert ts.score == pytest.approx((1.0 + (1 - s)) / 2, abs=1e-12)
        assert ts.n_phonemes == 2

    def test_self_match_is_exactly_zero(self, rng):
        ref = random_paf(rng, n_frames=40, track_id="ref")
        prof = build_profile("s", [ref])
        ts = score_track_phoneme(segment_phonemes(ref), prof, track_id="ref")
        assert ts.score == 0.0
        assert all(pd.distance == 0.0 for pd in ts.per_phoneme)

    def test_unseen_labels_skipped(self):
        prof = profile_from({"a": [[1.0, 0.0]]})
        f = paf_from_labels(["a", "b"], [[1.0, 0.0], [0.0, 1.0]])
        ts = score_track_phoneme(segment_phonemes(f), prof)
        assert ts.n_phonemes == 1
        assert [s.phoneme for s in ts.skipped_phonemes] == ["b"]
        assert ts.score == 0.0

    def test_no_scorable_raises(self):
        prof = profile_from({"a": [[1.0, 0.0]]})
        f = paf_from_labels(["b"], [[0.0, 1.0]])
        with pytest.raises(NoScorablePhonemes):
            score_track_phoneme(segment_phonemes(f), prof)
        with pytest.raises(NoScorablePhonemes):
            score_track_phoneme([], prof)

    def test_monotone_in_each_distance(self):
        prof = profile_from({"a": [[1.0, 0.0]], "b": [[1.0, 0.0]]})
        near = paf_from_labels(["a", "b"], [[1.0, 0.1], [1.0, 0.0]])
        far = paf_from_labels(["a", "b"], [[1.0, 0.1], [0.0, 1.0]])
        s_near = score_track_phoneme(segment_phonemes(near), prof).score
        s_far = score_track_phoneme(segment_phonemes(far), prof).score
        assert s_far > s_near

    def test_segment_order_invariance(self, rng):
        f = random_paf(rng, n_frames=50, track_id="t")
        prof = build_profile("s", [random_paf(rng, n_frames=80)])
        segs = segment_phonemes(f)
        fwd = score_track_phoneme(segs, prof).score
        rev = score_track_phoneme(segs[::-1], prof).score
        assert fwd == pytest.approx(rev, abs=1e-12)


class TestBaseline:
    def test_constant_frames(self):
        f = paf_from_labels(["a", "a"], [[1.5, 2.5], [1.5, 2.5]])
        assert np.array_equal(baseline_track_embedding(f), [1.5, 2.5])

    def test_mean(self):
        f = paf_from_labels(["a", None], [[0.0, 0.0], [2.0, 4.0]])
        assert np.allclose(baseline_track_embedding(f), [1.0, 2.0])

    def test_single_frame(self):
        f = paf_from_labels([None], [[3.0, -1.0]])
        assert np.array_equal(baseline_track_embedding(f), [3.0, -1.0])

    def test_empty_track(self):
        f = paf_from_labels([], np.zeros((0, 2)), dim=2)
        with pytest.raises(EmptyTrack):
            baseline_track_embedding(f)

    def test_self_match_zero(self, rng):
        ref = random_paf(rng, n_frames=30, track_id="ref")
        prof = build_profile("s", [ref])
        ts = score_track_baseline(ref, prof)
        assert ts.score == 0.0
        assert ts.mode == BASELINE_MODE

    def test_orthogonal_entry(self):
        prof = profile_from({"a": [[1.0, 0.0]]}, baselines=[[1.0, 0.0]])
        f = paf_from_labels(["a"], [[0.0, 1.0]])
        assert score_track_baseline(f, prof).score == 1.0

    def test_min_over_entries(self):
        s = 1 / math.sqrt(2)
        prof = profile_from({"a": [[1.0, 0.0]]}, baselines=[[1.0, 0.0], [s, s]])
        f = paf_from_labels(["a"], [[1.0, 0.0]])
        assert score_track_baseline(f, prof).score == 0.0

    def test_empty_reference_set(self):
        prof = SpeakerProfile(
            speaker_id="s",
            dim=2,
            phoneme_entries={},
            baseline_entries=np.zeros((0, 2), dtype=np.float32),
            n_reference_tracks=0,
        )
        f = paf_from_labels(["a"], [[1.0, 0.0]])
        with pytest.raises(EmptyReferenceSet):
            score_track_baseline(f, prof)

    def test_frame_order_invariance(self, rng):
        f = random_paf(rng, n_frames=40, track_id="t")
        perm = rng.permutation(f.n_frames)
        g = paf_from_labels(
            [None] * f.n_frames, f.features[perm], dim=f.dim
        )
        prof = build_profile("s", [random_paf(rng, n_frames=50)])
        a = score_track_baseline(f, prof).score
        b = score_track_baseline(g, prof).score
        assert a == pytest.approx(b, abs=1e-9)


class TestCategories:
    def vowel_consonant_track(self):
        return paf_from_labels(
            ["i", "s", "æ", "ŋ"],
            [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]],
        )

    def profile_for_track(self):
        return profile_from(
            {k: [[1.0, 0.5]] for k in ("i", "s", "æ", "ŋ")}
        )

    def test_all_equals_unfiltered(self):
        f = self.vowel_consonant_track()
        prof = self.profile_for_track()
        segs = segment_phonemes(f)
        full = score_track_phoneme(segs, prof)
        allcat = score_track_category(segs, prof, ALL_CATEGORY)
        assert allcat.score == full.score
        assert allcat.n_phonemes == full.n_phonemes

    def test_all_scores_labels_outside_every_category(self):
        prof = profile_from({"zz": [[1.0, 0.0]]})
        f = paf_from_labels(
            ["zz"], [[0.0, 1.0]], labels=("zz",)
        )
        segs = segment_phonemes(f)
        ts = score_track_category(segs, prof, ALL_CATEGORY)
        assert ts.score == 1.0
        with pytest.raises(NoScorablePhonemes):
            score_track_category(segs, prof, CATEGORIES["Vowels"])

    def test_empty_filter_raises(self):
        f = paf_from_labels(["i", "æ"], [[1.0, 0.0], [1.0, 1.0]])
        prof = self.profile_for_track()
        with pytest.raises(NoScorablePhonemes):
            score_track_category(segment_phonemes(f), prof, CATEGORIES["Nasals"])

    def test_matches_prefilter_oracle(self):
        f = self.vowel_consonant_track()
        prof = self.profile_for_track()
        segs = segment_phonemes(f)
        got = score_track_category(segs, prof, CATEGORIES["Vowels"])
        oracle_segs = [s for s in segs if s.phoneme in ("i", "æ")]
        oracle = score_track_phoneme(oracle_segs, prof)
        assert got.score == oracle.score
        assert got.n_phonemes == oracle.n_phonemes == 2

    def test_partition_of_default_inventory(self):
        names = [n for n in CATEGORIES if n != "All"]
        union = set()
        total = 0
        for n in names:
            members = CATEGORIES[n].members
            assert not (union & members), f"{n} overlaps another category"
            union |= members
            total += len(members)
        assert union == ALL_CATEGORY.members
        assert total == len(ALL_CATEGORY.members) == 40

    def test_parse_categories_override(self):
        table = parse_categories("# comment\nVowels: a e\nNasals: m n\n")
        assert table["Vowels"].members == {"a", "e"}
        assert table["All"].members == {"a", "e", "m", "n"}
        with pytest.raises(ValueError):
            parse_categories("not a table")


class TestReport:
    def test_grouped_means(self):
        prof = profile_from({"i": [[1.0, 0.0]], "s": [[1.0, 0.0]]})
        f = paf_from_labels(
            ["i", "s", "i"],
            [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0]],
        )
        ts = score_track_phoneme(segment_phonemes(f), prof, track_id="t")
        rep = per_phoneme_report(ts)
        means = dict((label, (m, n)) for label, m, n in rep.phoneme_means)
        assert means["i"] == (pytest.approx(0.5), 2)
        assert means["s"] == (pytest.approx(0.0), 1)
        assert rep.phoneme_means[0][0] == "i"  # sorted by mean desc
        assert rep.top(1) == [rep.phoneme_means[0]]

    def test_single_occurrence(self):
        prof = profile_from({"i": [[1.0, 0.0]]})
        f = paf_from_labels(["i"], [[1.0, 1.0]])
        rep = per_phoneme_report(score_track_phoneme(segment_phonemes(f), prof))
        assert len(rep.occurrences) == 1

    def test_order_is_time_order(self, rng):
        ref = random_paf(rng, n_frames=60)
        prof = build_profile("s", [ref])
        test = random_paf(rng, n_frames=50, track_id="t")
        ts = score_track_phoneme(segment_phonemes(test), prof, track_id="t")
        rep = per_phoneme_report(ts)
        starts = [pd.segment.start_frame for pd in rep.occurrences]
        assert starts == sorted(starts)

    def test_wrong_mode(self, rng):
        ref = random_paf(rng, n_frames=30)
        prof = build_profile("s", [ref])
        ts = score_track_baseline(ref, prof)
        with pytest.raises(WrongMode):
            per_phoneme_report(ts)

    def test_render_fields(self):
        prof = profile_from({"i": [[1.0, 0.0]]})
        f = paf_from_labels(["i"], [[0.0, 1.0]], track_id="trk9")
        rep = per_phoneme_report(
            score_track_phoneme(segment_phonemes(f), prof, track_id="trk9")
        )
        text = render_report(rep)
        lines = text.strip().split("\n")
        assert lines[0] == "track_id\tphoneme\tstart_time\tend_time\tdistance"
        fields = lines[1].split("\t")
        assert fields[0] == "trk9"
        assert fields[1] == "i"
        assert float(fields[4]) == pytest.approx(1.0)

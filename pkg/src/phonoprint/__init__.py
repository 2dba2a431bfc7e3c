"""Phoneme-level person-of-interest speech deepfake detection.

Builds phoneme-indexed speaker profiles from reference recordings and
scores test recordings by per-phoneme minimum cosine distance, with an
utterance-level baseline, an AUC/EER evaluation harness, and a
perturbation suite for robustness studies.
"""

from .categories import (
    ALL_CATEGORY,
    CATEGORIES,
    CATEGORY_NAMES,
    DEFAULT_INVENTORY,
    PhonemeCategory,
    get_category,
    parse_categories,
)
from .dsp import (
    AudioTrack,
    add_awgn,
    measure_snr,
    mp3_roundtrip_external,
    mulaw_roundtrip,
    normalize,
    read_wav,
    write_wav,
)
from .metrics import (
    EvalReport,
    LabeledScore,
    auc,
    delta_eer,
    eer,
    per_speaker_aggregate,
    render_eval_report,
    roc_curve,
)
from .paf import (
    NO_PHONEME,
    FrameRecord,
    PafFile,
    PhonemeInventory,
    PhonemeSegment,
    read_paf,
    segment_phonemes,
    track_phoneme_sets,
    write_paf,
)
from .profile import (
    CoverageReport,
    EnrollmentConfig,
    SpeakerProfile,
    build_profile,
    load_profile,
    profile_coverage,
    save_profile,
)
from .scoring import (
    BASELINE_MODE,
    PHONEME_MODE,
    PhonemeDistance,
    PhonemeReport,
    TrackScore,
    baseline_track_embedding,
    cosine_distance,
    per_phoneme_report,
    phoneme_min_distance,
    render_report,
    score_track_baseline,
    score_track_category,
    score_track_phoneme,
)

__version__ = "0.1.0"

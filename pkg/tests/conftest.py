import numpy as np
import pytest

from phonoprint import NO_PHONEME, PafFile, PhonemeInventory

IPA_LABELS = ("a", "b", "i", "æ", "ɑ", "tʃ", "ŋ", "s", "ə")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_paf(rng, n_frames=100, dim=8, labels=IPA_LABELS, silence_frac=0.2,
               track_id="trk"):
    ids = rng.integers(0, len(labels), size=n_frames).astype(np.uint16)
    silent = rng.random(n_frames) < silence_frac
    ids[silent] = NO_PHONEME
    feats = rng.normal(size=(n_frames, dim)).astype(np.float32)
    return PafFile(
        dim=dim,
        inventory=PhonemeInventory(labels),
        phoneme_ids=ids,
        features=feats,
        track_id=track_id,
    )


def paf_from_labels(label_seq, features, labels=IPA_LABELS, dim=None, **kwargs):
    """Build a PAF from a list of labels (None = silence) and row features."""
    inv = PhonemeInventory(labels)
    ids = np.array(
        [NO_PHONEME if a is None else inv.id_of(a) for a in label_seq],
        dtype=np.uint16,
    )
    feats = np.asarray(features, dtype=np.float32)
    if dim is None:
        dim = feats.shape[1] if feats.ndim == 2 else 1
    return PafFile(dim=dim, inventory=inv, phoneme_ids=ids, features=feats, **kwargs)

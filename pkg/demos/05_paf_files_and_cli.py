"""PAF container files and the batch CLI, end to end.

Writes a small dataset of PAF files plus a manifest, then drives the
installed `phonoprint` CLI: enroll -> score -> evaluate -> inspect.
"""

import csv
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

import phonoprint as pp
from phonoprint import synthetic as syn


def run(*args):
    cmd = [sys.executable, "-m", "phonoprint.cli", *args]
    print(f"\n$ phonoprint {' '.join(args)}")
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print(proc.stdout.rstrip() or proc.stderr.rstrip())
    return proc


rng = np.random.default_rng(11)
speaker = syn.make_cluster_speaker(rng, dim=16, sigma=0.05)

with tempfile.TemporaryDirectory(prefix="phonoprint-demo-") as tmp:
    work = Path(tmp)

    # One PAF file per track; the container carries frame geometry, the
    # phoneme inventory, and per-frame (phoneme_id, feature vector) rows.
    rows = []
    for i in range(6):
        track = syn.make_track(rng, speaker, f"ref-{i}", n_segments=40)
        (work / f"ref{i}.paf").write_bytes(pp.write_paf(track))
        rows.append(("spk", f"ref{i}.paf", 0, "reference"))
    for i in range(8):
        fake = i >= 4
        track = syn.make_track(
            rng, speaker, f"test-{i}", n_segments=30, shift=3.5 if fake else 0.0
        )
        (work / f"test{i}.paf").write_bytes(pp.write_paf(track))
        rows.append(("spk", f"test{i}.paf", int(fake), "test"))

    with (work / "manifest.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["speaker_id", "path", "label", "split"])
        writer.writerows(rows)

    run("enroll", "--manifest", str(work / "manifest.csv"),
        "--out-dir", str(work / "profiles"))
    run("score", "--profile", str(work / "profiles" / "spk.poip"),
        "--paf", str(work / "test7.paf"), "--threshold", "0.05")
    run("evaluate", "--manifest", str(work / "manifest.csv"),
        "--out-dir", str(work / "eval"), "--category-sweep")
    run("inspect", str(work / "profiles" / "spk.poip"))
    run("stats", "--manifest", str(work / "manifest.csv"))

    print("\ncategory sweep table:")
    print((work / "eval" / "categories.tsv").read_text())

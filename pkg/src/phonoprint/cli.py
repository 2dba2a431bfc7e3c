"""Command-line workflow driver.

Subcommands: enroll, score, evaluate, perturb, inspect, stats. Exit codes:
2 manifest error, 3 I/O or file-format failure, 4 no scorable phonemes,
5 dimension mismatch, 6 metrics not computable, 7 perturbation failure.

The manifest is a comma-separated text file with a header row:

    speaker_id,path,label,split

label is 0 (bona fide) or 1 (fake); split is "reference" or "test";
reference rows must carry label 0 (profiles are built on real data only).
Paths are resolved relative to the manifest's directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import categories as cat_mod
from . import dsp, metrics, paf as paf_mod, profile as profile_mod, scoring
from .errors import (
    DimMismatch,
    FormatError,
    NoScorablePhonemes,
    NoValidSpeaker,
    OneClassOnly,
    PhonoprintError,
)

log = logging.getLogger("phonoprint")

EXIT_MANIFEST = 2
EXIT_IO = 3
EXIT_NO_SCORABLE = 4
EXIT_DIM_MISMATCH = 5
EXIT_METRICS = 6
EXIT_PERTURB = 7


class ManifestError(PhonoprintError):
    pass


@dataclass
class ManifestRow:
    speaker_id: str
    path: Path
    label: int
    split: str


def read_manifest(path: str) -> list[ManifestRow]:
    base = Path(path).parent
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    required = {"speaker_id", "path", "label", "split"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise ManifestError(
            f"manifest needs columns {sorted(required)}, got {reader.fieldnames}"
        )
    rows = []
    for lineno, rec in enumerate(reader, 2):
        if rec["label"] not in ("0", "1"):
            raise ManifestError(f"line {lineno}: label must be 0 or 1")
        if rec["split"] not in ("reference", "test"):
            raise ManifestError(f"line {lineno}: split must be reference or test")
        if rec["split"] == "reference" and rec["label"] != "0":
            raise ManifestError(
                f"line {lineno}: reference rows must be bona fide (label 0)"
            )
        rows.append(
            ManifestRow(
                speaker_id=rec["speaker_id"],
                path=base / rec["path"],
                label=int(rec["label"]),
                split=rec["split"],
            )
        )
    if not rows:
        raise ManifestError("manifest has no rows")
    return rows


def _read_paf_file(path: Path) -> paf_mod.PafFile:
    return paf_mod.read_paf(path.read_bytes())


def _load_categories(args) -> dict[str, cat_mod.PhonemeCategory]:
    if getattr(args, "categories_file", None):
        return cat_mod.parse_categories(Path(args.categories_file).read_text("utf-8"))
    return cat_mod.CATEGORIES


def _build_profiles(rows, speakers, max_refs, min_coverage):
    """Build one profile per requested speaker from reference rows."""
    config = profile_mod.EnrollmentConfig(
        max_reference_tracks=max_refs, min_phoneme_coverage=min_coverage
    )
    by_speaker: dict[str, list[ManifestRow]] = {}
    for row in rows:
        if row.split == "reference" and (not speakers or row.speaker_id in speakers):
            by_speaker.setdefault(row.speaker_id, []).append(row)
    if not by_speaker:
        raise ManifestError("manifest has no reference rows for requested speakers")
    missing = set(speakers or ()) - set(by_speaker)
    if missing:
        raise ManifestError(f"no reference rows for speakers {sorted(missing)}")
    profiles = {}
    inventories = {}
    for speaker in sorted(by_speaker):
        pafs = [_read_paf_file(r.path) for r in by_speaker[speaker]]
        profiles[speaker] = profile_mod.build_profile(speaker, pafs, config)
        inventories[speaker] = pafs[0].inventory
    return profiles, inventories, config


def cmd_enroll(args) -> int:
    rows = read_manifest(args.manifest)
    profiles, inventories, config = _build_profiles(
        rows, set(args.speaker or ()), args.max_refs, args.min_coverage
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for speaker, prof in profiles.items():
        data = profile_mod.save_profile(prof)
        target = out_dir / f"{speaker}.poip"
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{speaker}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        cov = profile_mod.profile_coverage(prof, inventories[speaker])
        cov_lines = [
            f"speaker_id\t{speaker}",
            f"coverage\t{cov.coverage:.4f}",
            f"missing\t{' '.join(cov.missing)}",
            "phoneme\toccurrences",
        ]
        for label, count in cov.counts.items():
            cov_lines.append(f"{label}\t{count}")
        (out_dir / f"{speaker}.coverage.txt").write_text(
            "\n".join(cov_lines) + "\n", encoding="utf-8"
        )
        note = ""
        if cov.coverage < config.min_phoneme_coverage:
            note = f"  WARNING: coverage below {config.min_phoneme_coverage}"
            log.warning(
                "speaker %s coverage %.3f below requested %.3f",
                speaker,
                cov.coverage,
                config.min_phoneme_coverage,
            )
        print(
            f"enrolled {speaker}: {prof.n_reference_tracks} reference tracks, "
            f"{len(prof.phoneme_entries)} phonemes, coverage {cov.coverage:.3f}"
            f" -> {target}{note}"
        )
    return 0


def _score_one(paf_file, prof, mode, category, categories):
    if paf_file.dim != prof.dim:
        raise DimMismatch(
            f"track dim {paf_file.dim} vs profile dim {prof.dim}"
        )
    if mode == scoring.BASELINE_MODE:
        return scoring.score_track_baseline(paf_file, prof)
    segments = paf_mod.segment_phonemes(paf_file)
    if category:
        return scoring.score_track_category(
            segments, prof, categories[category], track_id=paf_file.track_id
        )
    return scoring.score_track_phoneme(segments, prof, track_id=paf_file.track_id)


def cmd_score(args) -> int:
    categories = _load_categories(args)
    if args.category and args.category not in categories:
        raise ManifestError(
            f"unknown category {args.category!r}; "
            f"known: {', '.join(categories)}"
        )
    prof = profile_mod.load_profile(Path(args.profile).read_bytes())
    paf_file = _read_paf_file(Path(args.paf))
    score = _score_one(paf_file, prof, args.mode, args.category, categories)
    print(f"track_id\t{paf_file.track_id}")
    print(f"mode\t{score.mode}")
    print(f"score\t{score.score:.9f}")
    if score.mode == scoring.PHONEME_MODE:
        print(f"n_phonemes\t{score.n_phonemes}")
        print(f"n_skipped\t{len(score.skipped_phonemes)}")
    if args.threshold is not None:
        decision = 1 if score.score >= args.threshold else 0
        print(f"decision\t{'fake' if decision else 'authentic'}")
    if args.report:
        if score.mode != scoring.PHONEME_MODE:
            log.warning("per-phoneme report requires phoneme mode; skipping")
        else:
            report = scoring.per_phoneme_report(score)
            Path(args.report).write_text(scoring.render_report(report), "utf-8")
            print(f"report\t{args.report}")
    return 0


def _score_rows(rows, profiles, mode, category, categories, jobs):
    """Score test rows in manifest order; unscorable tracks yield None."""

    def work(row):
        paf_file = _read_paf_file(row.path)
        try:
            score = _score_one(paf_file, profiles[row.speaker_id], mode, category, categories)
        except NoScorablePhonemes as exc:
            return row, None, str(exc)
        return row, score, None

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(work, rows))
    return [work(r) for r in rows]


def _labeled(results) -> list[metrics.LabeledScore]:
    return [
        metrics.LabeledScore(
            score=s.score, label=row.label, speaker_id=row.speaker_id,
            track_id=s.track_id or row.path.name,
        )
        for row, s, _err in results
        if s is not None
    ]


def _write_score_dump(path: Path, results):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["speaker_id", "track_id", "label", "score", "n_phonemes", "n_skipped"]
        )
        for row, s, err in results:
            if s is None:
                writer.writerow([row.speaker_id, str(row.path), row.label, "", 0, err])
            else:
                writer.writerow(
                    [
                        row.speaker_id,
                        s.track_id or row.path.name,
                        row.label,
                        f"{s.score:.12g}",
                        s.n_phonemes,
                        len(s.skipped_phonemes),
                    ]
                )


def _evaluate_scores(labeled, aggregation):
    """EvalReport for the requested aggregation; exit-6 errors propagate."""
    try:
        return metrics.per_speaker_aggregate(labeled)
    except NoValidSpeaker:
        if aggregation == "speaker-mean":
            raise
        points = metrics.roc_curve(labeled)
        return metrics.EvalReport(
            auc=metrics.auc(points), eer=metrics.eer(labeled), roc_points=points
        )


def cmd_evaluate(args) -> int:
    categories = _load_categories(args)
    if args.category and args.category not in categories:
        raise ManifestError(
            f"unknown category {args.category!r}; known: {', '.join(categories)}"
        )
    rows = read_manifest(args.manifest)
    test_rows = [r for r in rows if r.split == "test"]
    if not test_rows:
        raise ManifestError("manifest has no test rows")
    profiles, _invs, _config = _build_profiles(
        rows, {r.speaker_id for r in test_rows}, args.max_refs, 0.0
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    results = _score_rows(
        test_rows, profiles, args.mode, args.category, categories, args.jobs
    )
    n_unscored = sum(1 for _r, s, _e in results if s is None)
    if n_unscored:
        log.warning("%d test tracks had no scorable phonemes", n_unscored)
    _write_score_dump(out_dir / "scores.csv", results)
    labeled = _labeled(results)
    report = _evaluate_scores(labeled, args.aggregation)
    report_text = metrics.render_eval_report(report, args.aggregation)

    if args.perturbed_manifest:
        pert_rows = [
            r for r in read_manifest(args.perturbed_manifest) if r.split == "test"
        ]
        pert_results = _score_rows(
            pert_rows, profiles, args.mode, args.category, categories, args.jobs
        )
        _write_score_dump(out_dir / "scores_perturbed.csv", pert_results)
        pert_labeled = _labeled(pert_results)
        delta = metrics.delta_eer(labeled, pert_labeled)
        report_text += (
            "# robustness\n"
            f"eer_clean\t{metrics.eer(labeled):.6f}\n"
            f"eer_perturbed\t{metrics.eer(pert_labeled):.6f}\n"
            f"delta_eer_pp\t{delta:.4f}\n"
        )

    if args.category_sweep:
        sweep_lines = ["category\tn_scored\tn_unscorable\tauc\teer"]
        for name in cat_mod.CATEGORY_NAMES:
            cat_results = _score_rows(
                test_rows, profiles, scoring.PHONEME_MODE, name, categories, args.jobs
            )
            cat_labeled = _labeled(cat_results)
            n_bad = len(cat_results) - len(cat_labeled)
            try:
                cat_points = metrics.roc_curve(cat_labeled)
                cat_auc = f"{metrics.auc(cat_points):.6f}"
                cat_eer = f"{metrics.eer(cat_labeled):.6f}"
            except OneClassOnly:
                cat_auc = cat_eer = "nan"
            sweep_lines.append(
                f"{name}\t{len(cat_labeled)}\t{n_bad}\t{cat_auc}\t{cat_eer}"
            )
        (out_dir / "categories.tsv").write_text(
            "\n".join(sweep_lines) + "\n", "utf-8"
        )
        report_text += "# category sweep\twritten to categories.tsv\n"

    (out_dir / "report.txt").write_text(report_text, "utf-8")
    head_auc, head_eer = report.headline(args.aggregation)
    print(f"auc\t{head_auc:.6f}")
    print(f"eer\t{head_eer:.6f}")
    print(f"n_tracks\t{len(labeled)}")
    print(f"n_unscorable\t{n_unscored}")
    print(f"outputs\t{out_dir}")
    return 0


def cmd_perturb(args) -> int:
    track = dsp.read_wav(Path(args.input).read_bytes())
    meta = {"input": str(args.input)}
    if args.awgn_snr is not None:
        if args.seed is None:
            raise ManifestError("--awgn-snr requires --seed for reproducibility")
        out = dsp.add_awgn(track, args.awgn_snr, args.seed)
        meta.update(kind="awgn", snr_db=args.awgn_snr, seed=args.seed)
    elif args.mulaw:
        out = dsp.mulaw_roundtrip(track)
        meta.update(kind="mulaw", bits=8, mu=255)
    elif args.mp3:
        out = dsp.mp3_roundtrip_external(
            track, encoder_path=args.encoder, bitrate_kbps=args.bitrate
        )
        meta.update(kind="mp3", bitrate_kbps=args.bitrate)
    else:
        raise ManifestError("choose one of --awgn-snr, --mulaw, --mp3")
    Path(args.output).write_bytes(dsp.write_wav(out))
    Path(args.output + ".json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", "utf-8"
    )
    print(f"wrote {args.output}")
    return 0


def cmd_inspect(args) -> int:
    data = Path(args.file).read_bytes()
    magic = data[:4]
    if magic == paf_mod.MAGIC:
        f = paf_mod.read_paf(data)
        segments = paf_mod.segment_phonemes(f)
        print("type\tPAF")
        print(f"track_id\t{f.track_id}")
        print(f"sample_rate\t{f.sample_rate}")
        print(f"frame_len\t{f.frame_len}")
        print(f"hop\t{f.hop}")
        print(f"dim\t{f.dim}")
        print(f"inventory_size\t{len(f.inventory)}")
        print(f"n_frames\t{f.n_frames}")
        silence = int(np.sum(f.phoneme_ids == paf_mod.NO_PHONEME))
        print(f"n_silence_frames\t{silence}")
        print(f"n_segments\t{len(segments)}")
        print(f"duration_s\t{f.duration_seconds():.3f}")
        counts: dict[str, int] = {}
        for seg in segments:
            counts[seg.phoneme] = counts.get(seg.phoneme, 0) + 1
        for label in sorted(counts, key=lambda a: (-counts[a], a)):
            print(f"phoneme\t{label}\t{counts[label]}")
    elif magic == profile_mod.PROFILE_MAGIC:
        p = profile_mod.load_profile(data)
        print("type\tprofile")
        print(f"speaker_id\t{p.speaker_id}")
        print(f"dim\t{p.dim}")
        print(f"n_reference_tracks\t{p.n_reference_tracks}")
        print(f"n_phonemes\t{len(p.phoneme_entries)}")
        for label, vecs in p.phoneme_entries.items():
            print(f"phoneme\t{label}\t{vecs.shape[0]}")
    else:
        raise FormatError(f"unrecognized magic {magic!r}", offset=0)
    return 0


def cmd_stats(args) -> int:
    rows = read_manifest(args.manifest)
    print("split\tn_tracks\tmean_total_s\tmean_analyzed_s\tanalyzed_fraction")
    for split in ("reference", "test", "all"):
        chosen = rows if split == "all" else [r for r in rows if r.split == split]
        if not chosen:
            continue
        totals = []
        analyzed = []
        for row in chosen:
            f = _read_paf_file(row.path)
            totals.append(f.duration_seconds())
            analyzed.append(
                sum(s.end_time - s.start_time for s in paf_mod.segment_phonemes(f))
            )
        mean_total = float(np.mean(totals))
        mean_analyzed = float(np.mean(analyzed))
        frac = mean_analyzed / mean_total if mean_total else 0.0
        print(
            f"{split}\t{len(chosen)}\t{mean_total:.3f}\t{mean_analyzed:.3f}\t{frac:.3f}"
        )
    return 0


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonoprint",
        description="Phoneme-level person-of-interest speech deepfake detection.",
    )
    parser.add_argument("--config", help="JSON file with default flag values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def apply_config(sp):
        if config:
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in config.items() if k in known})

    p = sub.add_parser("enroll", help="build speaker profiles from reference PAFs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--speaker", action="append", help="restrict to these speakers")
    p.add_argument("--max-refs", type=int, default=100,
                   help="reference track cap per speaker (default 100)")
    p.add_argument("--min-coverage", type=float, default=0.0,
                   help="warn when phoneme coverage falls below this fraction")
    p.set_defaults(func=cmd_enroll)
    apply_config(p)

    p = sub.add_parser("score", help="score one PAF against a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--paf", required=True)
    p.add_argument("--mode", choices=("phoneme", "baseline"), default="phoneme")
    p.add_argument("--category", help="restrict scoring to one phoneme category")
    p.add_argument("--categories-file", help="category table override")
    p.add_argument("--report", help="write per-occurrence TSV report here")
    p.add_argument("--threshold", type=float,
                   help="print a fake/authentic decision at this threshold")
    p.set_defaults(func=cmd_score)
    apply_config(p)

    p = sub.add_parser("evaluate", help="run a labeled evaluation from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--mode", choices=("phoneme", "baseline"), default="phoneme")
    p.add_argument("--category", help="single-category evaluation")
    p.add_argument("--category-sweep", action="store_true",
                   help="emit per-category metrics (7 categories + All)")
    p.add_argument("--categories-file", help="category table override")
    p.add_argument("--aggregation", choices=("pooled", "speaker-mean"),
                   default="pooled")
    p.add_argument("--max-refs", type=int, default=100)
    p.add_argument("--perturbed-manifest",
                   help="second manifest of perturbed test tracks; adds a delta-EER section")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)
    apply_config(p)

    p = sub.add_parser("perturb", help="apply one audio perturbation to a WAV file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--awgn-snr", type=float, help="target SNR in dB")
    p.add_argument("--seed", type=int, help="noise seed (required with --awgn-snr)")
    p.add_argument("--mulaw", action="store_true")
    p.add_argument("--mp3", action="store_true")
    p.add_argument("--encoder", help="MP3 encoder binary (ffmpeg or lame style)")
    p.add_argument("--bitrate", type=int, default=128)
    p.set_defaults(func=cmd_perturb)
    apply_config(p)

    p = sub.add_parser("inspect", help="pretty-print a PAF or profile file")
    p.add_argument("file")
    p.set_defaults(func=cmd_inspect)
    apply_config(p)

    p = sub.add_parser("stats", help="analyzed-duration statistics for a manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_stats)
    apply_config(p)

    return parser


def _extract_config(argv) -> dict | None:
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            return json.loads(Path(argv[i + 1]).read_text("utf-8"))
        if arg.startswith("--config="):
            return json.loads(Path(arg.split("=", 1)[1]).read_text("utf-8"))
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        config = _extract_config(argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot load config: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    parser = build_parser(config)
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    except NoScorablePhonemes as exc:
        print(f"error: NoScorablePhonemes: {exc}", file=sys.stderr)
        return EXIT_NO_SCORABLE
    except DimMismatch as exc:
        print(f"error: DimMismatch: {exc}", file=sys.stderr)
        return EXIT_DIM_MISMATCH
    except (OneClassOnly, NoValidSpeaker) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_METRICS
    except (FormatError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except PhonoprintError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PERTURB


if __name__ == "__main__":
    sys.exit(main())

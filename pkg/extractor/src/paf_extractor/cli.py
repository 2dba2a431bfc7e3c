"""Batch extraction CLI: WAV files in, PAF files plus manifest lines out."""

import argparse
import glob
import sys
from pathlib import Path

from .errors import ExtractorError
from .extract import ExtractorConfig, extract_paf, make_backend


def expand_inputs(patterns):
    paths = []
    for pattern in patterns:
        matched = sorted(glob.glob(pattern))
        if not matched and Path(pattern).exists():
            matched = [pattern]
        paths.extend(matched)
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="paf-extract",
        description="Convert audio files into PAF feature files.",
    )
    parser.add_argument("inputs", nargs="+", help="WAV paths or globs")
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--config", help="JSON file of ExtractorConfig fields")
    parser.add_argument("--backend", choices=("spectral", "wav2vec2"))
    parser.add_argument("--feature-dim", type=int)
    parser.add_argument("--speaker", default="", help="speaker_id for manifest lines")
    parser.add_argument("--label", default="0", choices=("0", "1"))
    parser.add_argument("--split", default="test", choices=("reference", "test"))
    parser.add_argument("--manifest-out", help="append manifest lines to this file")
    args = parser.parse_args(argv)

    config = ExtractorConfig.from_file(args.config) if args.config else ExtractorConfig()
    if args.backend:
        config.backend = args.backend
    if args.feature_dim:
        config.feature_dim = args.feature_dim

    paths = expand_inputs(args.inputs)
    if not paths:
        print("error: no inputs matched", file=sys.stderr)
        return 2

    try:
        backend = make_backend(config)
    except ExtractorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    fragments = []
    for path in paths:
        try:
            target = extract_paf(path, args.out_dir, config, backend=backend)
        except ExtractorError as exc:
            print(f"error: {path}: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 4
        fragments.append(f"{args.speaker},{target},{args.label},{args.split}")
        print(fragments[-1])
    if args.manifest_out:
        with open(args.manifest_out, "a", encoding="utf-8") as fh:
            fh.write("\n".join(fragments) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

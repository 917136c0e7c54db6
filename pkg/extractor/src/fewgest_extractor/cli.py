"""Command line: fewgest-extract --input clip --class label --out file.gsjl"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .backends import resolve_backend
from .extract import ExtractionJob, extract_video


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fewgest-extract",
        description="convert an RGB gesture clip into a GSJL landmark record",
    )
    parser.add_argument("--input", required=True,
                        help="video file or directory of frame images")
    parser.add_argument("--class", dest="class_label", required=True)
    parser.add_argument("--sample-id", default=None,
                        help="default: <class>-<input stem>")
    parser.add_argument("--out", required=True, help="GSJL output path")
    parser.add_argument("--append", action="store_true",
                        help="append to --out instead of overwriting")
    parser.add_argument("--backend", choices=("auto", "mediapipe", "marker"),
                        default="auto")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    sample_id = args.sample_id or f"{args.class_label}-{Path(args.input).stem}"
    job = ExtractionJob(input_path=args.input, class_label=args.class_label,
                        sample_id=sample_id)
    try:
        backend = resolve_backend(args.backend)
    except ImportError as exc:
        print(f"error: backend {args.backend!r} unavailable: {exc}", file=sys.stderr)
        return 1
    try:
        n_valid = extract_video(job, backend, args.out, append=args.append)
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {sample_id}: {n_valid}/72 valid frames -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

    vidtext detect   --config cfg.json [--frames DIR] [--out DIR] ...
    vidtext classify --config cfg.json [--grammar FILE] ...
    vidtext toc      --config cfg.json ...
    vidtext eval     --config cfg.json ...
    vidtext synth    --config cfg.json [--seed N] ...

Every subcommand takes the same flags; unused ones are ignored by the
stage. The VIDTEXT_LOG environment variable (error|warn|info|debug)
controls log verbosity. Exit codes: 0 success, 2 missing inputs/IO
failure, 3 invalid configuration or file contents, 4 API contract
violation, 1 unexpected error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import apply_overrides, load_config
from .errors import (
    ContractError,
    FrameSequenceError,
    InputOutputError,
    ValidationError,
    VidtextError,
)
from .pipeline import run_classify, run_detect, run_eval, run_synth, run_toc

logger = logging.getLogger(__name__)

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_IO = 2
EXIT_INVALID = 3
EXIT_CONTRACT = 4


def _setup_logging() -> None:
    raw = os.environ.get("VIDTEXT_LOG", "warn").lower()
    level = _LOG_LEVELS.get(raw)
    logging.basicConfig(
        level=level if level is not None else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if level is None and raw:
        logger.warning("unknown VIDTEXT_LOG value %r, using 'warn'", raw)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vidtext",
        description="Detect, filter and classify superimposed text in frame sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("detect", "detect newly appearing text regions"),
        ("classify", "classify detections against a visual grammar"),
        ("toc", "build the table of contents from classified detections"),
        ("eval", "score detections against ground truth"),
        ("synth", "generate a synthetic benchmark corpus"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="pipeline config JSON")
        p.add_argument("--frames", help="frame directory (overrides config)")
        p.add_argument("--grammar", help="grammar JSON file (overrides config)")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="random seed (overrides config)")
        p.add_argument("--workers", type=int, help="worker process count")
        p.add_argument(
            "--dump-stage",
            action="append",
            metavar="NAME",
            help="dump an intermediate stage (repeatable): "
            "edges|binary|diff|leaves|regions|verdicts",
        )
        p.add_argument("--split-threshold", type=float, help="quadtree density threshold")
        p.add_argument("--sigma", type=int, help="contrast filter peak distance")
        p.add_argument("--r-max", type=float, help="texture regularity threshold")
        p.add_argument("--alpha", type=float, help="classification distance threshold")
        p.add_argument("--overlap-min", type=float, help="partial overlap minimum ratio")
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        config = apply_overrides(
            config,
            frames_dir=args.frames,
            grammar_file=args.grammar,
            out_dir=args.out,
            seed=args.seed,
            workers=args.workers,
            dump_stages=tuple(args.dump_stage) if args.dump_stage else None,
            split_threshold=args.split_threshold,
            contrast_sigma=args.sigma,
            r_max=args.r_max,
            alpha=args.alpha,
            overlap_min=args.overlap_min,
        )
        if args.command == "detect":
            manifest = run_detect(config)
            print(
                f"detect: {manifest['detections']} detections from "
                f"{manifest['pair_count']} pairs "
                f"({manifest['pairs_per_second']:.2f} pairs/s)"
            )
        elif args.command == "classify":
            manifest = run_classify(config)
            print(
                f"classify: {manifest['classified']} of {manifest['regions']} "
                "regions classified"
            )
        elif args.command == "toc":
            manifest = run_toc(config)
            print(f"toc: {manifest['entries']} entries, {manifest['anchors']} anchors")
        elif args.command == "eval":
            _, table = run_eval(config)
            print(table)
        else:
            manifest = run_synth(config)
            print(f"synth: {manifest['frame_count']} frames under {config.out_dir}")
        return EXIT_OK
    except (InputOutputError, FrameSequenceError) as exc:
        print(f"vidtext: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"vidtext: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ContractError as exc:
        print(f"vidtext: error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except VidtextError as exc:
        print(f"vidtext: error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())

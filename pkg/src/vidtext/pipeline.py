"""Stage orchestration: detect, classify, toc, eval and synth runs.

Each stage reads and writes JSON files under the configured output
directory, so stages can be re-run and inspected independently:

    detections.json  raw accepted regions from the detect stage
    classified.json  detections after grammar classification
    toc.json/.html   the table of contents
    report.json      evaluation metrics
    manifest_*.json  per-stage run manifest (config digest, tool version)

Detection work is split per frame pair; with workers > 1 the pairs are
distributed over a process pool and merged back in pair order, so the
output bytes do not depend on the worker count.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .classify import ClassifiedRegion, MappingCase, classify_region
from .config import PipelineConfig
from .edges import BinaryFrame, binarize, edge_pair_difference, sobel_edge_map
from .errors import ContractError, InputOutputError, ValidationError
from .evaluate import Detection, evaluate, load_ground_truth
from .frames import GrayFrame, load_frame_sequence, to_grayscale, write_image
from .geometry import Box
from .grammar import load_grammar
from .localize import merge_blocks, quadtree_split
from .filtering import filter_regions
from .synth import benchmark_spec, spec_from_dict, write_corpus
from .toc import build_toc, render_outputs

logger = logging.getLogger(__name__)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _read_json(path: Path, what: str):
    if not path.is_file():
        raise InputOutputError(f"{what} not found: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} {path} is not valid JSON: {exc}") from exc


def write_manifest(config: PipelineConfig, command: str, extra: dict) -> dict:
    manifest = {
        "command": command,
        "tool": "vidtext",
        "version": __version__,
        "config_digest": config.digest(),
        **extra,
    }
    _write_json(Path(config.out_dir) / f"manifest_{command}.json", manifest)
    return manifest


def _pair_task(args: tuple) -> dict:
    """Process one frame pair; runs in a worker process.

    Takes plain arrays so the payload pickles cheaply, returns plain dicts
    for the same reason.
    """
    prev_bits, next_bits, gray_pixels, frame_index, params = args
    prev = BinaryFrame(index=frame_index - 1, bits=prev_bits)
    nxt = BinaryFrame(index=frame_index, bits=next_bits)
    diff = edge_pair_difference(prev, nxt)
    leaves = quadtree_split(
        diff, threshold=params["split_threshold"], min_size=params["min_block_size"]
    )
    regions = merge_blocks(leaves, eps=params["density_eps"], frame_index=frame_index)
    gray = GrayFrame(index=frame_index, pixels=gray_pixels)
    verdicts = filter_regions(
        regions, gray, edge_mask=nxt, **params["filter_kwargs"]
    )
    out = {
        "frame": frame_index,
        "verdicts": [
            {
                "box": v.region.box.to_dict(),
                "density": v.region.density,
                "source_leaves": v.region.source_leaves,
                "accepted": v.accepted,
                "rejection_stage": v.rejection_stage,
                "peak_distance": v.contrast_peak_distance,
                "regularity": v.regularity,
            }
            for v in verdicts
        ],
    }
    if params["collect_leaves"]:
        out["leaves"] = [
            {**leaf.box.to_dict(), "density": leaf.density, "depth": leaf.depth}
            for leaf in leaves
        ]
    return out


def run_detect(config: PipelineConfig) -> dict:
    """Run detection over the configured frame sequence.

    Writes detections.json (accepted regions in (frame, x, y) order), any
    requested stage dumps, and a manifest recording the measured pair
    throughput. Returns the manifest.
    """
    if not config.frames_dir:
        raise ValidationError("detect requires frames_dir")
    out_dir = Path(config.out_dir)
    frames = load_frame_sequence(config.frames_dir, config.frame_pattern)
    logger.info("loaded %d frames from %s", len(frames), config.frames_dir)

    dump = set(config.dump_stages)
    dumps_dir = out_dir / "dumps"
    started = time.perf_counter()

    grays = [to_grayscale(f) for f in frames]
    binaries = []
    for gray in grays:
        edge = sobel_edge_map(gray)
        mask = binarize(edge)
        binaries.append(mask)
        if "edges" in dump:
            mag = edge.magnitudes
            peak = mag.max() or 1.0
            levels = np.floor(mag * (255.0 / peak) + 0.5).astype(np.uint8)
            dumps_dir.joinpath("edges").mkdir(parents=True, exist_ok=True)
            write_image(dumps_dir / "edges" / f"frame_{gray.index:06d}.pgm", levels)
        if "binary" in dump:
            dumps_dir.joinpath("binary").mkdir(parents=True, exist_ok=True)
            write_image(
                dumps_dir / "binary" / f"frame_{gray.index:06d}.pgm", mask.bits * 255
            )

    params = {
        "split_threshold": config.split_threshold,
        "min_block_size": config.min_block_size,
        "density_eps": config.density_eps,
        "filter_kwargs": config.filter_kwargs(),
        "collect_leaves": "leaves" in dump,
    }
    tasks = [
        (binaries[i - 1].bits, binaries[i].bits, grays[i].pixels, i, params)
        for i in range(1, len(frames))
    ]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_pair_task, tasks, chunksize=8))
    else:
        results = [_pair_task(t) for t in tasks]
    elapsed = time.perf_counter() - started

    rows = []
    for result in results:
        for v in result["verdicts"]:
            if not v["accepted"]:
                continue
            rows.append(
                {
                    "frame": result["frame"],
                    "box": v["box"],
                    "class": None,
                    "mean_distance": None,
                    "mapping": None,
                    "stage_scores": {
                        "density": v["density"],
                        "source_leaves": v["source_leaves"],
                        "peak_distance": v["peak_distance"],
                        "regularity": v["regularity"],
                    },
                }
            )
    rows.sort(key=lambda r: (r["frame"], r["box"]["x"], r["box"]["y"]))
    _write_json(out_dir / "detections.json", rows)

    if dump & {"diff", "leaves", "regions", "verdicts"}:
        for result in results:
            i = result["frame"]
            tag = f"pair_{i:06d}"
            if "diff" in dump:
                diff = edge_pair_difference(binaries[i - 1], binaries[i])
                dumps_dir.joinpath("diff").mkdir(parents=True, exist_ok=True)
                write_image(dumps_dir / "diff" / f"{tag}.pgm", diff.bits * 255)
            if "leaves" in dump:
                _write_json(dumps_dir / "leaves" / f"{tag}.json", result["leaves"])
            if "regions" in dump:
                regions = [
                    {
                        "box": v["box"],
                        "density": v["density"],
                        "source_leaves": v["source_leaves"],
                    }
                    for v in result["verdicts"]
                ]
                _write_json(dumps_dir / "regions" / f"{tag}.json", regions)
            if "verdicts" in dump:
                _write_json(dumps_dir / "verdicts" / f"{tag}.json", result["verdicts"])

    pair_count = len(tasks)
    rate = pair_count / elapsed if elapsed > 0 else 0.0
    logger.info("detect: %d pairs, %.2f pairs/s, %d detections", pair_count, rate, len(rows))
    return write_manifest(
        config,
        "detect",
        {
            "frame_count": len(frames),
            "pair_count": pair_count,
            "elapsed_seconds": elapsed,
            "pairs_per_second": rate,
            "detections": len(rows),
        },
    )


def _load_detection_rows(out_dir: Path) -> list[dict]:
    rows = _read_json(out_dir / "detections.json", "detections file")
    if not isinstance(rows, list):
        raise ValidationError("detections file must contain a JSON list")
    return rows


def run_classify(config: PipelineConfig) -> dict:
    """Classify the detect stage's output against the configured grammar.

    Writes classified.json, where `box` holds the final (possibly grammar-
    snapped) box and stage_scores additionally records the spatial overlap
    ratio. Returns the manifest.
    """
    if not config.grammar_file:
        raise ValidationError("classify requires grammar_file")
    if not config.frames_dir:
        raise ValidationError("classify requires frames_dir")
    out_dir = Path(config.out_dir)
    grammar = load_grammar(config.grammar_file)
    frames = load_frame_sequence(config.frames_dir, config.frame_pattern)
    rows = _load_detection_rows(out_dir)

    frame_map = {f.index: f for f in frames}
    results: list[dict] = []
    # Group rows per frame so each classify_all call shares its color cache.
    try:
        detections = [
            (int(row["frame"]), Box.from_dict(row["box"]), row) for row in rows
        ]
    except (KeyError, TypeError, ValueError, ContractError) as exc:
        raise ValidationError(f"malformed detection row: {exc}") from exc

    classified: list[tuple[ClassifiedRegion, dict]] = []
    cache: dict = {}
    for frame_index, box, row in detections:
        frame = frame_map.get(frame_index)
        if frame is None:
            raise ValidationError(f"detection references unknown frame {frame_index}")
        if frame.width != grammar.frame_w or frame.height != grammar.frame_h:
            raise ValidationError(
                f"frame size {frame.width}x{frame.height} does not match "
                f"grammar size {grammar.frame_w}x{grammar.frame_h}"
            )
        result = classify_region(
            frame,
            box,
            grammar,
            alpha=config.alpha,
            overlap_min=config.overlap_min,
            cache=cache,
        )
        classified.append((result, row))

    classified.sort(
        key=lambda item: (
            item[0].frame_index,
            item[0].detected_box.x,
            item[0].detected_box.y,
        )
    )
    for result, row in classified:
        scores = dict(row.get("stage_scores", {}))
        scores["overlap_ratio"] = result.overlap_ratio
        results.append(
            {
                "frame": result.frame_index,
                "box": result.final_box.to_dict(),
                "class": result.class_id,
                "mean_distance": result.mean_distance,
                "mapping": result.mapping.value,
                "stage_scores": scores,
            }
        )
    _write_json(out_dir / "classified.json", results)
    identified = sum(1 for r in results if r["class"] is not None)
    logger.info("classify: %d regions, %d classified", len(results), identified)
    # Classification is what gives detections their browsable meaning, so
    # the TOC artifacts are refreshed in the same step; the `toc` command
    # re-renders them alone (e.g. with different grouping settings).
    toc_counts = _emit_toc(config, grammar, out_dir)
    return write_manifest(
        config,
        "classify",
        {"regions": len(results), "classified": identified, **toc_counts},
    )


def _classified_regions(out_dir: Path, grammar) -> list[ClassifiedRegion]:
    rows = _read_json(out_dir / "classified.json", "classified detections file")
    if not isinstance(rows, list):
        raise ValidationError("classified detections file must contain a JSON list")
    regions = []
    labels = {cls.id: cls.label for cls in grammar.classes}
    for row in rows:
        try:
            box = Box.from_dict(row["box"])
            class_id = row["class"]
            if class_id is not None and class_id not in labels:
                raise ValidationError(f"classified row names unknown class {class_id!r}")
            regions.append(
                ClassifiedRegion(
                    frame_index=int(row["frame"]),
                    detected_box=box,
                    final_box=box,
                    class_id=class_id,
                    label=labels.get(class_id),
                    mapping=MappingCase(row["mapping"]),
                    overlap_ratio=float(
                        row.get("stage_scores", {}).get("overlap_ratio", 0.0)
                    ),
                    mean_distance=row["mean_distance"],
                )
            )
        except (KeyError, TypeError, ValueError, ContractError) as exc:
            raise ValidationError(f"malformed classified row: {exc}") from exc
    return regions


def _emit_toc(config: PipelineConfig, grammar, out_dir: Path) -> dict:
    """Build and render toc.json/toc.html; returns the entry/anchor counts."""
    regions = _classified_regions(out_dir, grammar)
    video = config.video_name or (
        Path(config.frames_dir).name if config.frames_dir else "video"
    )
    toc = build_toc(
        regions, grammar, video, gap_max=config.gap_max, iou_min=config.iou_min
    )
    frames = None
    if config.emit_thumbnails:
        if not config.frames_dir:
            raise ValidationError("emit_thumbnails requires frames_dir")
        frames = {
            f.index: f
            for f in load_frame_sequence(config.frames_dir, config.frame_pattern)
        }
    toc = render_outputs(toc, out_dir, frames=frames)
    anchors = sum(len(e.anchors) for e in toc.entries) + len(toc.unclassified)
    logger.info("toc: %d entries, %d anchors", len(toc.entries), anchors)
    return {"entries": len(toc.entries), "anchors": anchors}


def run_toc(config: PipelineConfig) -> dict:
    """Build toc.json and toc.html from the classified detections."""
    if not config.grammar_file:
        raise ValidationError("toc requires grammar_file")
    out_dir = Path(config.out_dir)
    grammar = load_grammar(config.grammar_file)
    return write_manifest(config, "toc", _emit_toc(config, grammar, out_dir))


def format_report_table(report) -> str:
    """Fixed-width text table of an EvalReport, for the eval subcommand."""

    def fmt(value) -> str:
        return "n/a" if value is None else f"{value:.4f}"

    lines = [
        f"{'metric':<13}value",
        f"{'recall':<13}{fmt(report.recall)}",
        f"{'precision':<13}{fmt(report.precision)}",
        f"{'false_alarm':<13}{fmt(report.false_alarm)}",
        f"{'txti':<13}{fmt(report.txti)}",
        f"{'txtni':<13}{fmt(report.txtni)}",
        "",
        f"ground_truth_total {report.counts.ground_truth_total}",
        f"detected_total     {report.counts.detected_total}",
        f"correct            {report.counts.correct}",
        f"wrong              {report.counts.wrong}",
        f"identified         {report.counts.identified}",
    ]
    return "\n".join(lines)


def run_eval(config: PipelineConfig) -> tuple[dict, str]:
    """Evaluate detections (and classifications, when present) against the
    configured ground truth; writes report.json and returns the manifest
    together with the printable metric table."""
    if not config.ground_truth_file:
        raise ValidationError("eval requires ground_truth_file")
    out_dir = Path(config.out_dir)
    truths = load_ground_truth(config.ground_truth_file)
    det_rows = _load_detection_rows(out_dir)
    try:
        detections = [
            Detection(frame=int(r["frame"]), box=Box.from_dict(r["box"])) for r in det_rows
        ]
    except (KeyError, TypeError, ValueError, ContractError) as exc:
        raise ValidationError(f"malformed detection row: {exc}") from exc

    classified = None
    classified_path = out_dir / "classified.json"
    if classified_path.is_file():
        rows = _read_json(classified_path, "classified detections file")
        try:
            classified = [
                Detection(
                    frame=int(r["frame"]),
                    box=Box.from_dict(r["box"]),
                    class_id=r["class"],
                )
                for r in rows
            ]
        except (KeyError, TypeError, ValueError, ContractError) as exc:
            raise ValidationError(f"malformed classified row: {exc}") from exc

    report = evaluate(
        detections,
        truths,
        min_intersection=config.min_intersection,
        classified=classified,
    )
    _write_json(out_dir / "report.json", report.to_dict())
    table = format_report_table(report)
    manifest = write_manifest(config, "eval", {"report": report.to_dict()})
    return manifest, table


def run_synth(config: PipelineConfig) -> dict:
    """Generate a synthetic corpus under out_dir.

    The corpus layout comes from the config's `synth` section; without one,
    the standard benchmark corpus is produced. The seed is the config seed.
    """
    spec = spec_from_dict(config.synth) if config.synth else benchmark_spec()
    paths = write_corpus(spec, config.seed, config.out_dir)
    logger.info("synth: wrote %d frames under %s", paths["frame_count"], config.out_dir)
    return write_manifest(config, "synth", paths)

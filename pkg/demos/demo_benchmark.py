"""
End-to-end benchmark on a synthetic corpus
==========================================

Generates the standard synthetic benchmark (352x288, 200 frames, three
text classes, twelve timed overlay events), then runs the whole chain —
detect, classify, evaluate — and prints the throughput recorded in the
detect manifest alongside the final metric table.
"""

import json
import tempfile
import time
from pathlib import Path

from vidtext.config import PipelineConfig
from vidtext.pipeline import run_classify, run_detect, run_eval, run_synth

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    config = PipelineConfig(
        frames_dir=str(root / "frames"),
        grammar_file=str(root / "grammar.json"),
        ground_truth_file=str(root / "truth.json"),
        out_dir=str(root),
        seed=7,
        workers=1,
    )

    # -----------------------------------------------------------------------
    # 1. Synthesize the corpus: frames, the grammar measured from clean
    #    reference renderings, and the ground-truth annotations.
    # -----------------------------------------------------------------------
    run_synth(config)
    n_frames = len(list((root / "frames").iterdir()))
    truths = json.loads((root / "truth.json").read_text())
    print(f"corpus: {n_frames} frames, {len(truths)} annotated events")

    # -----------------------------------------------------------------------
    # 2. Detect. The manifest records how many consecutive frame pairs were
    #    compared and the measured pairs/second.
    # -----------------------------------------------------------------------
    started = time.perf_counter()
    detect_manifest = run_detect(config)
    print(
        f"detect: {detect_manifest['pair_count']} pairs "
        f"at {detect_manifest['pairs_per_second']:.1f} pairs/s"
    )
    detections = json.loads((root / "detections.json").read_text())
    print(f"        {len(detections)} accepted regions")

    # -----------------------------------------------------------------------
    # 3. Classify against the generated grammar (this also emits the TOC),
    #    then score everything against ground truth.
    # -----------------------------------------------------------------------
    run_classify(config)
    toc = json.loads((root / "toc.json").read_text())
    anchor_count = sum(len(e["anchors"]) for e in toc["entries"])
    print(f"classify: TOC lists {anchor_count} anchors across {len(toc['entries'])} classes")

    _, table = run_eval(config)
    elapsed = time.perf_counter() - started
    print(f"\n{table}")
    print(f"\ndetect+classify+eval took {elapsed:.1f}s")

"""
Building a table of contents from classified sightings
======================================================

Once detections carry class labels, repeated sightings of the same overlay
collapse to their first appearance and the survivors become navigation
anchors, grouped per class — a thematic table of contents for the video.
"""

import tempfile
from pathlib import Path

from vidtext.classify import ClassifiedRegion, MappingCase
from vidtext.frames import rgb_to_hsv
from vidtext.geometry import Box
from vidtext.grammar import GrammarDescriptor, SubRegionFeature, TextClass
from vidtext.toc import build_toc, deduplicate_anchors, render_outputs

BANNER_BOX = Box(10, 10, 40, 20)
CAPTION_BOX = Box(10, 40, 40, 20)


def sighting(frame, box, class_id, label):
    return ClassifiedRegion(
        frame_index=frame, detected_box=box, final_box=box,
        class_id=class_id, label=label,
        mapping=MappingCase.EQUALITY if class_id else MappingCase.DISJUNCTION,
        overlap_ratio=1.0 if class_id else 0.0,
        mean_distance=0.0 if class_id else None,
    )


# ---------------------------------------------------------------------------
# 1. Raw classified sightings: the banner is re-detected on consecutive
#    frames (it flickers as the video compresses), the caption appears
#    twice far apart, and one detection matched no class at all.
# ---------------------------------------------------------------------------
sightings = [
    sighting(100, BANNER_BOX, "banner", "Score banner"),
    sighting(101, BANNER_BOX, "banner", "Score banner"),   # same overlay, next frame
    sighting(103, BANNER_BOX, "banner", "Score banner"),   # still the same one
    sighting(400, BANNER_BOX, "banner", "Score banner"),   # a genuinely new showing
    sighting(150, CAPTION_BOX, "caption", "Lower third"),
    sighting(320, CAPTION_BOX, "caption", "Lower third"),
    sighting(260, Box(60, 5, 20, 12), None, None),         # unclassified
]

kept = deduplicate_anchors(sightings, gap_max=25, iou_min=0.7)
print("after deduplication:")
for region in kept:
    print(f"  frame {region.frame_index:4d}  class {region.class_id}")

# ---------------------------------------------------------------------------
# 2. Grouping into the TOC: entries follow grammar order; anchors that no
#    class claimed are listed separately rather than dropped.
# ---------------------------------------------------------------------------
grammar = GrammarDescriptor(
    channel="demo", program="toc", frame_w=96, frame_h=64,
    alpha=0.15, overlap_min=0.8,
    classes=tuple(
        TextClass(
            id=i, label=l, region=b,
            subregions=(SubRegionFeature(box=Box(0, 0, 4, 4), hsv=rgb_to_hsv(255, 0, 0)),),
        )
        for i, l, b in (
            ("banner", "Score banner", BANNER_BOX),
            ("caption", "Lower third", CAPTION_BOX),
        )
    ),
)
toc = build_toc(sightings, grammar, video="demo-match")
for entry in toc.entries:
    frames = [a.frame for a in entry.anchors]
    print(f"{entry.label} ({entry.class_id}): anchors at frames {frames}")
print(f"unclassified anchors: {[a.frame for a in toc.unclassified]}")

# ---------------------------------------------------------------------------
# 3. Rendering: toc.json for machines, toc.html for humans.
# ---------------------------------------------------------------------------
out_dir = Path(tempfile.mkdtemp(prefix="toc_demo_"))
render_outputs(toc, out_dir)
print(f"\nwrote {out_dir / 'toc.json'}")
print(f"wrote {out_dir / 'toc.html'}")
print("\nfirst lines of the HTML page:")
print("\n".join((out_dir / "toc.html").read_text().splitlines()[:8]))

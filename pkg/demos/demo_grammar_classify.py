"""
Visual grammars and semantic classification
===========================================

Broadcast overlays are repetitive: the score banner always sits in the
same corner with the same color trim. A *visual grammar* captures that —
each text class is a frame region plus sub-regions annotated with their
dominant HSV color. New detections are classified by where they sit and
how well the colors still match.
"""

import numpy as np

from vidtext.classify import classify_region, spatial_mapping
from vidtext.frames import RgbFrame
from vidtext.geometry import Box
from vidtext.grammar import GrammarDescriptor, build_grammar_entry, dominant_hsv

# ---------------------------------------------------------------------------
# 1. A reference frame: the banner region flanked by a red and a green
#    marker patch. The grammar is *measured* from this frame.
# ---------------------------------------------------------------------------
W, H = 96, 64
REGION = Box(16, 16, 48, 24)
LEFT, RIGHT = Box(16, 16, 8, 8), Box(56, 16, 8, 8)

pixels = np.zeros((H, W, 3), dtype=np.uint8)
pixels[LEFT.y:LEFT.y2, LEFT.x:LEFT.x2] = (200, 40, 40)
pixels[RIGHT.y:RIGHT.y2, RIGHT.x:RIGHT.x2] = (40, 200, 40)
reference = RgbFrame(index=0, pixels=pixels)

print("dominant HSV of the left marker: ",
      tuple(round(v, 3) for v in dominant_hsv(reference, LEFT)))

banner = build_grammar_entry(
    reference, class_id="banner", label="Score banner",
    region=REGION, subregion_boxes=[LEFT, RIGHT],
)
grammar = GrammarDescriptor(
    channel="demo", program="match", frame_w=W, frame_h=H,
    alpha=0.15, overlap_min=0.8, classes=(banner,),
)

# ---------------------------------------------------------------------------
# 2. Spatial mapping: how a detected box relates to a class region decides
#    whether the class is even *considered*.
# ---------------------------------------------------------------------------
for name, box in (
    ("same box       ", REGION),
    ("inside region  ", Box(20, 18, 30, 18)),
    ("strong overlap ", Box(18, 18, 48, 24)),
    ("far away       ", Box(70, 40, 20, 16)),
):
    case, ratio = spatial_mapping(box, REGION)
    print(f"{name} -> {case.value:16s} overlap ratio {ratio:.2f}")

# ---------------------------------------------------------------------------
# 3. Classification on a later frame that still shows the markers: the
#    measured colors match, so the mean distance is 0 and the detection is
#    snapped onto the grammar's canonical region.
# ---------------------------------------------------------------------------
result = classify_region(reference, Box(20, 18, 30, 18), grammar)
print(f"\nclassified as {result.class_id!r} ({result.label}), "
      f"mapping {result.mapping.value}, distance {result.mean_distance}")
print(f"detected box {result.detected_box} snapped to {result.final_box}")

# ---------------------------------------------------------------------------
# 4. On a frame whose markers changed color, the distance exceeds alpha and
#    the region stays unclassified — right place, wrong look.
# ---------------------------------------------------------------------------
faded = pixels.copy()
faded[LEFT.y:LEFT.y2, LEFT.x:LEFT.x2] = (60, 60, 60)
faded[RIGHT.y:RIGHT.y2, RIGHT.x:RIGHT.x2] = (60, 60, 60)
result = classify_region(RgbFrame(index=1, pixels=faded), REGION, grammar)
print(f"\nfaded markers -> class {result.class_id}, "
      f"distance {result.mean_distance:.3f} > alpha {grammar.alpha}")

"""
Contrast and stroke-texture filtering of candidate regions
==========================================================

Localization over-generates: moving objects and texture also produce new
edges. Two appearance properties separate overlaid text from those false
candidates — readable text keeps high contrast against its backdrop, and
its strokes form an evenly spaced family of parallel line segments.
"""

import numpy as np

from vidtext.filtering import (
    contrast_filter,
    extract_lstf,
    filter_regions,
    histogram_peaks,
    hough_line_segments,
    lstf_filter,
    regularity,
)
from vidtext.frames import GrayFrame
from vidtext.geometry import Box
from vidtext.localize import CandidateRegion

# ---------------------------------------------------------------------------
# 1. Contrast: the two dominant gray-level peaks of a text region sit far
#    apart (lettering vs box fill). The filter demands > sigma levels.
# ---------------------------------------------------------------------------
text_like = np.zeros((20, 60), dtype=np.uint8)
text_like[:, ::10] = 255
passed, distance = contrast_filter(text_like, sigma=110)
print(f"high-contrast crop: peaks {histogram_peaks(np.bincount(text_like.ravel(), minlength=256).tolist())}, "
      f"distance {distance}, pass={passed}")

washed_out = np.full((20, 60), 100, dtype=np.uint8)
washed_out[:, ::10] = 160
passed, distance = contrast_filter(washed_out, sigma=110)
print(f"washed-out crop:    peak distance {distance}, pass={passed}")

# ---------------------------------------------------------------------------
# 2. Stroke texture: a Hough transform peels line segments off the region's
#    edge mask. Text strokes form one orientation family with near-equal
#    spacing; the regularity score is the normalized deviation of the gaps.
# ---------------------------------------------------------------------------
strokes = np.zeros((40, 64), dtype=np.uint8)
for x in (6, 16, 26, 36, 46, 56):
    strokes[4:36, x] = 1
segments = hough_line_segments(strokes)
print(f"\ndetected {len(segments)} segments")
feature = extract_lstf(segments)
print(f"dominant family: theta={feature.theta[0]} deg, gaps delta_r={feature.delta_r}")
print(f"regularity R = {regularity(feature):.4f}  (0 = perfectly periodic)")

ragged = np.zeros((40, 64), dtype=np.uint8)
for x in (6, 9, 33, 60):
    ragged[4:36, x] = 1
passed, raw = lstf_filter(ragged, r_max=0.2)
print(f"ragged spacing: R = {raw:.4f}, pass={passed}")

# ---------------------------------------------------------------------------
# 3. The combined verdict pipeline: size -> contrast -> stroke texture.
#    Each candidate reports the first stage that rejected it.
# ---------------------------------------------------------------------------
frame_pixels = np.full((96, 160), 128, dtype=np.uint8)
frame_pixels[32:64, 32:128] = 0
for x in range(37, 123, 10):
    frame_pixels[32:64, x:x + 5] = 255
frame = GrayFrame(index=1, pixels=frame_pixels)

candidates = [
    CandidateRegion(frame_index=1, box=Box(32, 32, 96, 32), density=0.4, source_leaves=12),
    CandidateRegion(frame_index=1, box=Box(0, 0, 8, 8), density=0.4, source_leaves=1),
    CandidateRegion(frame_index=1, box=Box(0, 64, 32, 24), density=0.3, source_leaves=4),
]
print()
for verdict in filter_regions(candidates, frame):
    b = verdict.region.box
    status = "ACCEPTED" if verdict.accepted else f"rejected at {verdict.rejection_stage}"
    print(f"({b.x:3d},{b.y:3d}) {b.w:3d}x{b.h:<3d} -> {status}")

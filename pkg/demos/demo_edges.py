"""
Edge maps, automatic binarization, and frame pair differencing
==============================================================

Superimposed text announces itself as *new edges*: contours that exist in
one frame but not in the previous one. This walk-through builds that
appearance signal from scratch on a pair of tiny synthetic frames.
"""

import numpy as np

from vidtext.edges import binarize, edge_pair_difference, otsu_threshold, sobel_edge_map
from vidtext.frames import GrayFrame

# ---------------------------------------------------------------------------
# 1. Two consecutive frames: a flat backdrop, then the same backdrop with a
#    bright box "switched on". Only the second frame has the box contours.
# ---------------------------------------------------------------------------
backdrop = np.full((24, 40), 120, dtype=np.uint8)

with_box = backdrop.copy()
with_box[8:16, 12:28] = 250

prev_frame = GrayFrame(index=0, pixels=backdrop)
next_frame = GrayFrame(index=1, pixels=with_box)

# ---------------------------------------------------------------------------
# 2. Gradient magnitudes via the 3x3 Sobel operator. The flat frame has no
#    gradients at all; the second frame lights up along the box outline.
# ---------------------------------------------------------------------------
prev_edges = sobel_edge_map(prev_frame)
next_edges = sobel_edge_map(next_frame)
print("max gradient, flat frame:   ", prev_edges.magnitudes.max())
print("max gradient, frame with box:", round(float(next_edges.magnitudes.max()), 1))

# ---------------------------------------------------------------------------
# 3. Otsu's method picks the binarization threshold from the magnitude
#    histogram itself — no hand tuning. Here the histogram splits into
#    "flat interior" and "box outline" populations.
# ---------------------------------------------------------------------------
levels = np.floor(
    next_edges.magnitudes * (255.0 / next_edges.magnitudes.max()) + 0.5
).astype(np.uint8)
histogram = np.bincount(levels.ravel(), minlength=256).tolist()
print("otsu threshold over the rescaled magnitudes:", otsu_threshold(histogram))

prev_mask = binarize(prev_edges)
next_mask = binarize(next_edges)
print("edge pixels before:", int(prev_mask.bits.sum()))
print("edge pixels after: ", int(next_mask.bits.sum()))

# ---------------------------------------------------------------------------
# 4. The pair difference keeps edges of the NEW frame that the old frame
#    did not have: background contours cancel out, appearing text survives.
#    With a flat backdrop every box edge is new.
# ---------------------------------------------------------------------------
diff = edge_pair_difference(prev_mask, next_mask)
print("newly appeared edge pixels:", int(diff.bits.sum()))

rows = ["".join("#" if v else "." for v in row) for row in diff.bits]
print("\nappearance mask (# = new edge):")
print("\n".join(rows))

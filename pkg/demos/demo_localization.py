"""
Quadtree split-and-merge localization of appearing text
=======================================================

The appearance mask from frame differencing is sparse and scattered; the
localizer turns it into rectangular candidate regions. A quadtree keeps
subdividing while a block contains any set pixel, keeps the dense leaves,
and then glues adjacent leaves of similar density back together.
"""

import numpy as np

from vidtext.edges import BinaryFrame
from vidtext.localize import localize_candidates, merge_blocks, quadtree_split
from vidtext.frames import GrayFrame

# ---------------------------------------------------------------------------
# 1. A synthetic appearance mask: the outline + stroke edges of a text-like
#    band, plus a couple of isolated noise pixels far away.
# ---------------------------------------------------------------------------
bits = np.zeros((64, 96), dtype=np.uint8)
bits[16, 16:80] = 1          # top outline
bits[39, 16:80] = 1          # bottom outline
for x in range(16, 80, 8):   # periodic stroke edges
    bits[16:40, x] = 1
bits[58, 5] = 1              # stray noise
bits[3, 90] = 1

mask = BinaryFrame(index=1, bits=bits)

# ---------------------------------------------------------------------------
# 2. Quadtree split: recursive 4-way subdivision while a block holds any
#    edge pixel; blocks that can no longer split are kept when their edge
#    density clears the threshold. Noise pixels end up in leaves whose
#    density is too low, so they vanish here.
# ---------------------------------------------------------------------------
leaves = quadtree_split(mask, threshold=0.1, min_size=8)
print(f"dense leaves: {len(leaves)}")
for leaf in leaves[:4]:
    print(f"  leaf at ({leaf.box.x:3d},{leaf.box.y:3d}) "
          f"{leaf.box.w}x{leaf.box.h}  density {leaf.density:.3f}  depth {leaf.depth}")
print("  ...")

# ---------------------------------------------------------------------------
# 3. Merge: adjacent leaves (sharing at least one pixel of border, corners
#    do not count) whose densities differ by at most eps fuse into one
#    candidate region — ideally one box per appearing text block.
# ---------------------------------------------------------------------------
regions = merge_blocks(leaves, eps=0.15, frame_index=1)
for region in regions:
    b = region.box
    print(f"candidate region ({b.x},{b.y}) {b.w}x{b.h} "
          f"from {region.source_leaves} leaves, density {region.density:.3f}")

# ---------------------------------------------------------------------------
# 4. The one-call front end: give it two grayscale frames and it runs the
#    whole edge -> binarize -> difference -> split -> merge chain.
# ---------------------------------------------------------------------------
before = np.full((64, 96), 128, dtype=np.uint8)
after = before.copy()
after[16:40, 16:80] = 0
for x in range(21, 75, 10):
    after[16:40, x:x + 5] = 255

candidates = localize_candidates(
    GrayFrame(index=0, pixels=before), GrayFrame(index=1, pixels=after)
)
print("\nfrom raw frame pair:")
for c in candidates:
    print(f"  candidate ({c.box.x},{c.box.y}) {c.box.w}x{c.box.h} density {c.density:.3f}")

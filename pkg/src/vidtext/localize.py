"""Quadtree split-and-merge localization of dense difference regions.

The appeared-edge mask of a frame pair is recursively quartered while it
still contains set bits; terminal blocks whose bit density exceeds the
split threshold are kept as dense leaves. Adjacent leaves with similar
density are merged into candidate regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .edges import BinaryFrame, binarize, edge_pair_difference, sobel_edge_map
from .errors import ContractError
from .frames import GrayFrame
from .geometry import Box, union_box

DEFAULT_SPLIT_THRESHOLD = 0.10
DEFAULT_MIN_BLOCK_SIZE = 8
DEFAULT_DENSITY_EPS = 0.15


@dataclass(frozen=True)
class Block:
    """One quadtree leaf: its box, bit density and depth below the root."""

    box: Box
    density: float
    depth: int


@dataclass(frozen=True)
class CandidateRegion:
    """A merged dense area inside the difference mask of one frame pair.

    `frame_index` is the later frame of the pair, so it is always >= 1.
    `density` is the leaf-area-weighted mean bit density and `source_leaves`
    the number of quadtree leaves merged into the region.
    """

    frame_index: int
    box: Box
    density: float
    source_leaves: int

    def __post_init__(self) -> None:
        if self.frame_index < 1:
            raise ContractError(
                f"candidate frame index must be >= 1, got {self.frame_index}"
            )
        if self.source_leaves < 1:
            raise ContractError("candidate region needs at least one source leaf")


def block_edge_density(diff: BinaryFrame, box: Box) -> float:
    """Fraction of set bits inside `box`, which must lie within the mask."""
    if box.x < 0 or box.y < 0 or box.x2 > diff.width or box.y2 > diff.height:
        raise ContractError(f"block {box} exceeds mask bounds")
    window = diff.bits[box.y : box.y2, box.x : box.x2]
    return int(window.sum()) / box.area


def quadtree_split(
    diff: BinaryFrame,
    threshold: float = DEFAULT_SPLIT_THRESHOLD,
    min_size: int = DEFAULT_MIN_BLOCK_SIZE,
) -> list[Block]:
    """Return the dense terminal leaves of the quadtree over `diff`.

    A block is quartered (floor/ceil halves) while it contains any set bit
    and both sides are at least twice `min_size`; smaller or bit-free blocks
    terminate the recursion. Terminal blocks with density strictly greater
    than `threshold` are returned, in depth-first NW, NE, SW, SE order.
    """
    if threshold < 0:
        raise ContractError(f"split threshold must be >= 0, got {threshold}")
    if min_size < 1:
        raise ContractError(f"min block size must be >= 1, got {min_size}")
    h, w = diff.bits.shape
    if h == 0 or w == 0:
        return []
    # Summed-area table makes the per-block bit count O(1).
    integral = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(np.cumsum(diff.bits, axis=0, dtype=np.int64), axis=1, out=integral[1:, 1:])

    def bit_count(x: int, y: int, bw: int, bh: int) -> int:
        return int(
            integral[y + bh, x + bw]
            - integral[y, x + bw]
            - integral[y + bh, x]
            + integral[y, x]
        )

    leaves: list[Block] = []
    stack: list[tuple[int, int, int, int, int]] = [(0, 0, w, h, 0)]
    while stack:
        x, y, bw, bh, depth = stack.pop()
        bits = bit_count(x, y, bw, bh)
        if bits == 0:
            continue
        if min(bw, bh) >= 2 * min_size:
            w1, h1 = bw // 2, bh // 2
            w2, h2 = bw - w1, bh - h1
            # Pushed in reverse so the pop order is NW, NE, SW, SE.
            stack.append((x + w1, y + h1, w2, h2, depth + 1))
            stack.append((x, y + h1, w1, h2, depth + 1))
            stack.append((x + w1, y, w2, h1, depth + 1))
            stack.append((x, y, w1, h1, depth + 1))
            continue
        density = bits / (bw * bh)
        if density > threshold:
            leaves.append(Block(box=Box(x, y, bw, bh), density=density, depth=depth))
    return leaves


def _adjacent(a: Box, b: Box) -> bool:
    """True when the boxes share a boundary segment of length >= 1 pixel."""
    if a.x2 == b.x or b.x2 == a.x:
        return min(a.y2, b.y2) - max(a.y, b.y) >= 1
    if a.y2 == b.y or b.y2 == a.y:
        return min(a.x2, b.x2) - max(a.x, b.x) >= 1
    return False


def merge_blocks(
    leaves: list[Block],
    eps: float = DEFAULT_DENSITY_EPS,
    frame_index: int = 1,
) -> list[CandidateRegion]:
    """Group adjacent, similar-density leaves into candidate regions.

    Two leaves belong together when they touch along an edge (corner contact
    does not count) and their densities differ by at most `eps`. Each
    connected component becomes one region: the bounding box of its leaves,
    with leaf-area-weighted mean density. Regions are sorted by (x, y).
    """
    if eps < 0:
        raise ContractError(f"density epsilon must be >= 0, got {eps}")
    n = len(leaves)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(leaves[i].density - leaves[j].density) <= eps and _adjacent(
                leaves[i].box, leaves[j].box
            ):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    groups: dict[int, list[Block]] = {}
    for i, leaf in enumerate(leaves):
        groups.setdefault(find(i), []).append(leaf)

    regions = []
    for members in groups.values():
        box = members[0].box
        for leaf in members[1:]:
            box = union_box(box, leaf.box)
        leaf_area = sum(m.box.area for m in members)
        weighted = sum(m.density * m.box.area for m in members)
        regions.append(
            CandidateRegion(
                frame_index=frame_index,
                box=box,
                density=weighted / leaf_area,
                source_leaves=len(members),
            )
        )
    regions.sort(key=lambda r: (r.box.x, r.box.y, r.box.w, r.box.h))
    return regions


def candidates_from_diff(
    diff: BinaryFrame,
    threshold: float = DEFAULT_SPLIT_THRESHOLD,
    min_size: int = DEFAULT_MIN_BLOCK_SIZE,
    eps: float = DEFAULT_DENSITY_EPS,
) -> list[CandidateRegion]:
    """Split `diff` into dense leaves and merge them into candidate regions.

    The mask must come from a frame pair difference, so its index (>= 1)
    identifies the pair.
    """
    leaves = quadtree_split(diff, threshold=threshold, min_size=min_size)
    return merge_blocks(leaves, eps=eps, frame_index=diff.index)


def localize_candidates(
    prev: GrayFrame,
    nxt: GrayFrame,
    threshold: float = DEFAULT_SPLIT_THRESHOLD,
    min_size: int = DEFAULT_MIN_BLOCK_SIZE,
    eps: float = DEFAULT_DENSITY_EPS,
) -> list[CandidateRegion]:
    """Locate probable text regions appearing between two consecutive frames.

    Composes the edge front end (Sobel, binarization, pair differencing)
    with the quadtree split-and-merge over the appeared-edge mask. The
    returned regions carry the later frame's index and are interpreted
    against that frame.
    """
    if prev.pixels.shape != nxt.pixels.shape:
        raise ContractError("frame pair must share one frame size")
    diff = edge_pair_difference(
        binarize(sobel_edge_map(prev)), binarize(sobel_edge_map(nxt))
    )
    return candidates_from_diff(diff, threshold=threshold, min_size=min_size, eps=eps)

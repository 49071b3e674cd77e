"""Independent reference implementations used as test oracles.

Everything here is deliberately written the slow, obvious way — explicit
loops, recursion, exhaustive enumeration, exact rational arithmetic — and
shares no code with the library. Tests compare library output against
these references instead of asserting values the implementation itself
produced.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def otsu_exhaustive(histogram) -> int:
    """Minimize within-class variance over all 256 splits, exactly.

    Levels <= t form the low class; only splits with a non-empty low class
    are candidates; ties go to the smallest t. The within-class variance of
    a split is evaluated directly as the summed squared deviation of each
    class from its own mean, sum(c*(l - mu)^2) = sum(c*l^2) - (sum(c*l))^2
    / weight, in exact rational arithmetic.
    """
    hist = [int(v) for v in histogram]
    assert len(hist) == 256 and sum(hist) > 0
    total_w = sum(hist)
    total_s = sum(level * c for level, c in enumerate(hist))
    total_q = sum(level * level * c for level, c in enumerate(hist))
    best_t = None
    best_var = None
    w0 = s0 = q0 = 0
    for t in range(256):
        c = hist[t]
        w0 += c
        s0 += t * c
        q0 += t * t * c
        if w0 == 0:
            continue
        within = Fraction(q0) - Fraction(s0 * s0, w0)
        w1 = total_w - w0
        if w1 > 0:
            s1, q1 = total_s - s0, total_q - q0
            within += Fraction(q1) - Fraction(s1 * s1, w1)
        if best_var is None or within < best_var:
            best_t, best_var = t, within
    return best_t


def sobel_reference(pixels: np.ndarray) -> np.ndarray:
    """Dense 3x3 Sobel magnitude by direct per-pixel convolution."""
    kx = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    ky = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]
    h, w = pixels.shape
    out = np.zeros((h, w), dtype=np.float64)
    p = pixels.astype(np.int64)
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            gx = sum(
                kx[dy][dx] * int(p[y + dy - 1, x + dx - 1])
                for dy in range(3)
                for dx in range(3)
            )
            gy = sum(
                ky[dy][dx] * int(p[y + dy - 1, x + dx - 1])
                for dy in range(3)
                for dx in range(3)
            )
            out[y, x] = math.sqrt(gx * gx + gy * gy)
    return out


def quadtree_reference(bits: np.ndarray, threshold: float, min_size: int) -> list[tuple]:
    """Recursive reference quadtree; returns (x, y, w, h, depth) dense leaves.

    Splits while a block holds any set bit and both sides are at least
    twice min_size; terminal blocks with density strictly above the
    threshold are collected in NW, NE, SW, SE depth-first order.
    """
    leaves: list[tuple] = []

    def recurse(x: int, y: int, w: int, h: int, depth: int) -> None:
        window = bits[y : y + h, x : x + w]
        count = int(window.sum())
        if count == 0:
            return
        if min(w, h) >= 2 * min_size:
            w1, h1 = w // 2, h // 2
            recurse(x, y, w1, h1, depth + 1)
            recurse(x + w1, y, w - w1, h1, depth + 1)
            recurse(x, y + h1, w1, h - h1, depth + 1)
            recurse(x + w1, y + h1, w - w1, h - h1, depth + 1)
            return
        if count / (w * h) > threshold:
            leaves.append((x, y, w, h, depth))

    if bits.size:
        recurse(0, 0, bits.shape[1], bits.shape[0], 0)
    return leaves


def merge_reference(leaves, eps: float) -> list[tuple]:
    """Brute-force merge oracle over Block-like (box, density) leaves.

    Adjacency is established by rasterizing each leaf onto a grid and
    looking for 4-neighbor contacts between cells of different leaves,
    which is exactly "shares a boundary segment of at least one pixel".
    Returns one (x, y, w, h, member_count, density) tuple per connected
    component under the adjacency-and-similar-density relation, sorted.
    """
    n = len(leaves)
    if n == 0:
        return []
    width = max(leaf.box.x2 for leaf in leaves)
    height = max(leaf.box.y2 for leaf in leaves)
    grid = np.full((height, width), -1, dtype=np.int64)
    for i, leaf in enumerate(leaves):
        b = leaf.box
        grid[b.y : b.y2, b.x : b.x2] = i

    linked = [[False] * n for _ in range(n)]
    for y in range(height):
        for x in range(width):
            a = grid[y, x]
            if a < 0:
                continue
            for ny, nx in ((y + 1, x), (y, x + 1)):
                if ny >= height or nx >= width:
                    continue
                b = grid[ny, nx]
                if b < 0 or b == a:
                    continue
                if abs(leaves[a].density - leaves[b].density) <= eps:
                    linked[a][b] = linked[b][a] = True

    seen = [False] * n
    components = []
    for start in range(n):
        if seen[start]:
            continue
        queue = [start]
        seen[start] = True
        members = []
        while queue:
            i = queue.pop()
            members.append(i)
            for j in range(n):
                if linked[i][j] and not seen[j]:
                    seen[j] = True
                    queue.append(j)
        boxes = [leaves[i].box for i in members]
        x1 = min(b.x for b in boxes)
        y1 = min(b.y for b in boxes)
        x2 = max(b.x2 for b in boxes)
        y2 = max(b.y2 for b in boxes)
        area = sum(b.area for b in boxes)
        density = sum(leaves[i].density * leaves[i].box.area for i in members) / area
        components.append((x1, y1, x2 - x1, y2 - y1, len(members), density))
    components.sort()
    return components


def hough_oracle_segments(
    mask: np.ndarray, vote_min: int, gap_tol: float, len_min: float
) -> list[tuple]:
    """Exhaustive line-segment enumeration over all (theta, rho) bins.

    Every one-degree/one-pixel accumulator cell with at least `vote_min`
    votes is traced: its own pixels are ordered along the line, split at
    gaps above `gap_tol`, and runs of positive span at least `len_min`
    yield (theta, rho, start, end) tuples. Nothing is removed, so parallel
    near-duplicates from neighboring cells all appear; consumers compare
    with a +-1 bin tolerance.
    """
    ys, xs = np.nonzero(mask)
    points = list(zip(xs.tolist(), ys.tolist()))
    if not points:
        return []
    segments: list[tuple] = []
    for theta in range(180):
        rad = math.radians(theta)
        cos_t, sin_t = math.cos(rad), math.sin(rad)
        cells: dict[int, list[tuple]] = {}
        for x, y in points:
            rho = x * cos_t + y * sin_t
            cells.setdefault(round(rho), []).append((x, y))
        for rho_bin, members in sorted(cells.items()):
            if len(members) < vote_min:
                continue
            ts = sorted(-x * sin_t + y * cos_t for x, y in members)
            start = 0
            for i in range(1, len(ts) + 1):
                if i == len(ts) or ts[i] - ts[i - 1] > gap_tol:
                    span = ts[i - 1] - ts[start]
                    if span > 0 and span >= len_min:
                        segments.append((theta, float(rho_bin), ts[start], ts[i - 1]))
                    start = i
    return segments


def hough_bin_matches(impl_seg, oracle_segs, tol: int = 1) -> bool:
    """True when an implementation segment lies within `tol` theta/rho bins
    of some oracle segment, honoring the 180-degree wrap (where rho flips
    sign)."""
    ti, ri = impl_seg.theta_deg, impl_seg.rho
    for to, ro, _, _ in oracle_segs:
        if abs(ti - to) <= tol and abs(ri - ro) <= tol:
            return True
        if 180 - abs(ti - to) <= tol and abs(ri + ro) <= tol:
            return True
    return False


def match_optimal(detections, truths, min_intersection: float) -> int:
    """Maximum number of one-to-one detection/truth matches, by recursion.

    The eligibility rule mirrors the evaluator: frame within the truth span
    and coverage of the truth box at least `min_intersection`. Used to
    bound the greedy matcher (greedy <= optimal).
    """
    from vidtext.evaluate import coverage_ratio

    eligible = []
    for d_idx, det in enumerate(detections):
        row = []
        for t_idx, truth in enumerate(truths):
            if (
                truth.first_frame <= det.frame <= truth.last_frame
                and coverage_ratio(det, truth) >= min_intersection
            ):
                row.append(t_idx)
        eligible.append(row)

    def best(d_idx: int, used: frozenset) -> int:
        if d_idx == len(detections):
            return 0
        top = best(d_idx + 1, used)
        for t_idx in eligible[d_idx]:
            if t_idx not in used:
                top = max(top, 1 + best(d_idx + 1, used | {t_idx}))
        return top

    return best(0, frozenset())

"""Edge maps, optimal-threshold binarization and temporal edge differencing.

The detection front end turns each grayscale frame into a binary edge mask
and then keeps, for every consecutive pair, only the edges that appear in
the later frame. Static scenery cancels out; newly overlaid strokes survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .frames import GrayFrame


@dataclass(frozen=True, eq=False)
class EdgeFrame:
    """Sobel gradient magnitudes for one frame, float64, zero on the border ring."""

    index: int
    magnitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.magnitudes.ndim != 2 or self.magnitudes.dtype != np.float64:
            raise ContractError("EdgeFrame expects a (h, w) float64 array")

    @property
    def width(self) -> int:
        return self.magnitudes.shape[1]

    @property
    def height(self) -> int:
        return self.magnitudes.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryFrame:
    """Binary mask for one frame: `bits` is a (h, w) uint8 array of 0/1."""

    index: int
    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.bits.ndim != 2 or self.bits.dtype != np.uint8:
            raise ContractError("BinaryFrame expects a (h, w) uint8 array")

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def set_count(self) -> int:
        return int(self.bits.sum())


def sobel_edge_map(frame: GrayFrame) -> EdgeFrame:
    """Apply the 3x3 Sobel operator and return the gradient magnitude.

    magnitude = sqrt(fx^2 + fy^2) with the standard [-1 0 1; -2 0 2; -1 0 1]
    horizontal kernel and its transpose. The one-pixel border, where the
    kernel does not fit, is left at zero; frames smaller than 3x3 yield an
    all-zero map.
    """
    p = frame.pixels.astype(np.int64)
    h, w = p.shape
    mag = np.zeros((h, w), dtype=np.float64)
    if h >= 3 and w >= 3:
        gx = (
            p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:]
            - p[:-2, :-2] - 2 * p[1:-1, :-2] - p[2:, :-2]
        )
        gy = (
            p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:]
            - p[:-2, :-2] - 2 * p[:-2, 1:-1] - p[:-2, 2:]
        )
        # sqrt of the exact integer gx^2 + gy^2 is correctly rounded by
        # IEEE 754, so the magnitudes are bit-reproducible everywhere.
        mag[1:-1, 1:-1] = np.sqrt(gx * gx + gy * gy)
    return EdgeFrame(index=frame.index, magnitudes=mag)


def otsu_threshold(histogram) -> int:
    """Interclass-variance-optimal threshold over a 256-bin histogram.

    Levels <= t form the low class, levels > t the high class. Only
    thresholds whose low class is non-empty are candidates; among maximizers
    of the between-class variance the smallest t wins. All arithmetic is
    exact (integer cross-multiplication), so ties are decided consistently
    on every platform.
    """
    hist = [int(v) for v in histogram]
    if len(hist) != 256:
        raise ContractError(f"histogram must have 256 bins, got {len(hist)}")
    if any(v < 0 for v in hist):
        raise ContractError("histogram counts must be non-negative")
    total = sum(hist)
    if total == 0:
        raise ContractError("histogram is empty")
    weighted_total = sum(i * v for i, v in enumerate(hist))

    best_t = -1
    best_num = 0  # squared numerator of the best variance ratio
    best_den = 1
    w0 = 0
    s0 = 0
    for t in range(256):
        w0 += hist[t]
        s0 += t * hist[t]
        if w0 == 0:
            continue
        w1 = total - w0
        if w1 == 0:
            num, den = 0, 1
        else:
            diff = weighted_total * w0 - s0 * total
            num, den = diff * diff, w0 * w1
        if best_t < 0 or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def binarize(edge: EdgeFrame, threshold: int | None = None) -> BinaryFrame:
    """Quantize an edge map to 8 bits and threshold it.

    Magnitudes are rescaled so the frame maximum maps to 255, rounded to
    integer levels, and a per-frame optimal threshold is derived from their
    histogram unless an explicit `threshold` is given. Bits are set where
    the quantized level is strictly greater than the threshold. An all-zero
    edge map short-circuits to an all-zero mask.
    """
    mag = edge.magnitudes
    peak = float(mag.max()) if mag.size else 0.0
    if peak == 0.0:
        return BinaryFrame(index=edge.index, bits=np.zeros(mag.shape, dtype=np.uint8))
    levels = np.floor(mag * (255.0 / peak) + 0.5).astype(np.int64)
    if threshold is None:
        hist = np.bincount(levels.ravel(), minlength=256)
        threshold = otsu_threshold(hist)
    elif not 0 <= threshold <= 255:
        raise ContractError(f"threshold out of range: {threshold}")
    bits = (levels > threshold).astype(np.uint8)
    return BinaryFrame(index=edge.index, bits=bits)


def edge_pair_difference(prev: BinaryFrame, nxt: BinaryFrame) -> BinaryFrame:
    """Bits set in `nxt` but not in `prev`: the newly appeared edges.

    The two masks must come from consecutive frames; the result carries the
    later frame's index.
    """
    if nxt.index != prev.index + 1:
        raise ContractError(
            f"edge pair must be consecutive, got indices {prev.index} and {nxt.index}"
        )
    if prev.bits.shape != nxt.bits.shape:
        raise ContractError("edge pair masks must share one frame size")
    bits = (nxt.bits & ~prev.bits & 1).astype(np.uint8)
    return BinaryFrame(index=nxt.index, bits=bits)

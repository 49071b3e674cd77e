"""Candidate region filtering: size, gray contrast and stroke texture.

Localization is deliberately permissive, so every candidate runs a gauntlet
of three cheap tests. A region survives when it is large enough to hold
text, its gray histogram shows two well separated populations (glyphs vs
backdrop), and its edge mask contains a family of parallel line segments
with regular spacing, which is what rows of printed strokes produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .edges import BinaryFrame, binarize, sobel_edge_map
from .errors import ContractError
from .frames import GrayFrame
from .localize import CandidateRegion

DEFAULT_CONTRAST_SIGMA = 110
DEFAULT_PEAK_SEPARATION = 8
DEFAULT_R_MAX = 0.2
DEFAULT_MIN_REGION_W = 16
DEFAULT_MIN_REGION_H = 8
DEFAULT_VOTE_MIN = 8
DEFAULT_GAP_TOL = 2.0
DEFAULT_LEN_MIN = 4.0
DEFAULT_TRACE_WIDTH = 1.0

FILTER_STAGES = ("size", "contrast", "lstf")


@dataclass(frozen=True)
class LineSegment:
    """A straight run of edge pixels in normal form.

    `theta_deg` in [0, 180) is the normal direction of the supporting line,
    `rho` its signed distance from the origin. `start_t` and `end_t` bound
    the run along the line direction; the length is their difference.
    """

    theta_deg: float
    rho: float
    start_t: float
    end_t: float

    @property
    def length(self) -> float:
        return self.end_t - self.start_t


@dataclass(frozen=True)
class Lstf:
    """Line segment texture feature of one co-oriented segment family.

    For the dominant one-degree orientation bin, segments are ordered by
    their line offset rho. `delta_r` holds the successive rho differences
    (the inter-stroke gaps, one fewer than the segment count), while
    `theta`, `r` and `dist` hold per-segment orientations, lengths and
    start offsets relative to the family's earliest start.
    """

    delta_r: tuple
    theta: tuple
    r: tuple
    dist: tuple

    @property
    def segment_count(self) -> int:
        return len(self.r)


@dataclass(frozen=True)
class FilterVerdict:
    """Outcome of the filter gauntlet for one candidate region.

    `rejection_stage` names the first failing test (size, contrast or
    lstf), or is None for accepted regions. `contrast_peak_distance` and
    `regularity` record the measurements of the stages that ran; the
    regularity is the raw (unclamped) value.
    """

    region: CandidateRegion
    accepted: bool
    rejection_stage: str | None
    contrast_peak_distance: int | None = None
    regularity: float | None = None


def histogram_peaks(histogram, min_separation: int = DEFAULT_PEAK_SEPARATION) -> list[int]:
    """Positions of the two dominant local maxima, ascending.

    Candidate levels are local maxima of the 256-bin histogram (no smaller
    than either neighbor, nonzero count). The two with the largest counts
    win (ties to the lower level), subject to the second lying at least
    `min_separation` levels from the first. Degenerate histograms return
    fewer than two peaks.
    """
    hist = [int(v) for v in histogram]
    if len(hist) != 256:
        raise ContractError(f"histogram must have 256 bins, got {len(hist)}")
    if any(v < 0 for v in hist):
        raise ContractError("histogram counts must be non-negative")
    if min_separation < 1:
        raise ContractError(f"peak separation must be >= 1, got {min_separation}")
    padded = [0] + hist + [0]
    maxima = [
        i
        for i in range(256)
        if hist[i] > 0 and hist[i] >= padded[i] and hist[i] >= padded[i + 2]
    ]
    peaks: list[int] = []
    for level in sorted(maxima, key=lambda i: (-hist[i], i)):
        if len(peaks) == 2:
            break
        if all(abs(level - p) >= min_separation for p in peaks):
            peaks.append(level)
    return sorted(peaks)


def contrast_filter(
    gray_crop: np.ndarray,
    sigma: int = DEFAULT_CONTRAST_SIGMA,
    min_separation: int = DEFAULT_PEAK_SEPARATION,
) -> tuple[bool, int]:
    """Check that two dominant gray populations are more than `sigma` apart.

    Returns (passed, peak_distance); a degenerate histogram with fewer than
    two separated peaks fails with distance 0.
    """
    if gray_crop.ndim != 2:
        raise ContractError("contrast_filter expects a 2-D gray crop")
    hist = np.bincount(gray_crop.astype(np.uint8).ravel(), minlength=256)
    peaks = histogram_peaks(hist, min_separation=min_separation)
    if len(peaks) < 2:
        return False, 0
    distance = peaks[1] - peaks[0]
    return distance > sigma, distance


def hough_line_segments(
    mask: np.ndarray,
    vote_min: int = DEFAULT_VOTE_MIN,
    gap_tol: float = DEFAULT_GAP_TOL,
    len_min: float = DEFAULT_LEN_MIN,
    trace_width: float = DEFAULT_TRACE_WIDTH,
) -> list[LineSegment]:
    """Extract straight segments from a binary mask by accumulator peeling.

    The Hough accumulator uses one-degree orientation bins over [0, 180)
    and one-pixel offset bins. Repeatedly, the strongest cell with at least
    `vote_min` votes is taken (ties: smallest theta, then smallest rho);
    the pixels within `trace_width` of its line are sorted along the line,
    split where consecutive positions differ by more than `gap_tol`, and
    runs of positive extent spanning at least `len_min` become segments.
    Traced pixels are removed before the next round, so nearby parallel
    ridges collapse into one trace instead of echoing in adjacent cells.
    """
    if mask.ndim != 2:
        raise ContractError("hough_line_segments expects a 2-D mask")
    if vote_min < 1:
        raise ContractError(f"vote_min must be >= 1, got {vote_min}")
    if gap_tol < 0 or len_min < 0 or trace_width < 0.5:
        raise ContractError("gap_tol/len_min must be >= 0 and trace_width >= 0.5")
    ys, xs = np.nonzero(mask)
    n = len(xs)
    if n == 0:
        return []
    xs = xs.astype(np.float64)
    ys = ys.astype(np.float64)
    angles = np.deg2rad(np.arange(180, dtype=np.float64))
    cos_t, sin_t = np.cos(angles), np.sin(angles)
    h, w = mask.shape
    offset = int(math.ceil(math.hypot(w, h)))
    nbins = 2 * offset + 1
    rho_real = np.outer(cos_t, xs) + np.outer(sin_t, ys)  # (180, n)
    rho_bin = np.rint(rho_real).astype(np.int64) + offset
    acc = np.zeros((180, nbins), dtype=np.int64)
    for k in range(180):
        acc[k] = np.bincount(rho_bin[k], minlength=nbins)
    active = np.ones(n, dtype=bool)
    theta_rows = np.arange(180)[:, None]

    segments: list[LineSegment] = []
    while True:
        flat = int(np.argmax(acc))
        k, b = divmod(flat, nbins)
        if acc[k, b] < vote_min:
            break
        line_rho = float(b - offset)
        sel = active & (np.abs(rho_real[k] - line_rho) <= trace_width)
        idx = np.nonzero(sel)[0]
        t = -xs[idx] * sin_t[k] + ys[idx] * cos_t[k]
        order = np.argsort(t, kind="stable")
        t = t[order]
        start = 0
        for i in range(1, len(t) + 1):
            if i == len(t) or t[i] - t[i - 1] > gap_tol:
                span = t[i - 1] - t[start]
                if span > 0.0 and span >= len_min:
                    segments.append(
                        LineSegment(
                            theta_deg=float(k),
                            rho=line_rho,
                            start_t=float(t[start]),
                            end_t=float(t[i - 1]),
                        )
                    )
                start = i
        active[idx] = False
        np.subtract.at(acc, (theta_rows, rho_bin[:, idx]), 1)
    segments.sort(key=lambda s: (s.theta_deg, s.rho, s.start_t))
    return segments


def extract_lstf(segments: Sequence[LineSegment]) -> Lstf | None:
    """Build the texture feature of the dominant co-oriented segment family.

    Segments are grouped into one-degree orientation bins; the bin with the
    most segments wins (ties: smaller bin). Within the family, segments are
    ordered by (rho, start_t); successive rho differences form `delta_r`.
    Returns None when no family has at least two segments, which callers
    treat as insufficient structure.

    Arithmetic stays in plain Python, so exact coordinate types survive.
    """
    if not segments:
        return None
    bins: dict[int, list[LineSegment]] = {}
    for seg in segments:
        key = int(math.floor(seg.theta_deg)) % 180
        bins.setdefault(key, []).append(seg)
    dominant = min(bins, key=lambda k: (-len(bins[k]), k))
    family = sorted(bins[dominant], key=lambda s: (s.rho, s.start_t, s.theta_deg))
    if len(family) < 2:
        return None
    rhos = [s.rho for s in family]
    t0 = min(s.start_t for s in family)
    return Lstf(
        delta_r=tuple(rhos[i + 1] - rhos[i] for i in range(len(rhos) - 1)),
        theta=tuple(s.theta_deg for s in family),
        r=tuple(s.end_t - s.start_t for s in family),
        dist=tuple(s.start_t - t0 for s in family),
    )


def regularity(feature, printed_dbar: bool = False) -> float:
    """Spacing irregularity of a segment family; 0 means perfectly periodic.

    Accepts an Lstf or a bare gap sequence. With gaps g_i (i = 1..ns-1) and
    mean gap dbar = sum(g_i) / (ns - 1) = (last - first) / (ns - 1):

        R = sum(|g_i - dbar|) / ((ns - 1) * dbar)

    Computed exactly in rational arithmetic, so equal gaps give exactly
    0.0. A degenerate family (dbar <= 0, i.e. coincident segments) returns
    infinity so any threshold fails it. With `printed_dbar`, an alternative
    mean with the total span reduced by one is used.
    """
    gaps = feature.delta_r if isinstance(feature, Lstf) else feature
    gaps = [Fraction(g) for g in gaps]
    if not gaps:
        raise ContractError("regularity needs at least one gap (two segments)")
    count = len(gaps)
    total = sum(gaps)
    dbar = (total - 1) / count if printed_dbar else total / count
    if dbar <= 0:
        return math.inf
    deviation = sum(abs(g - dbar) for g in gaps)
    return float(deviation / (count * dbar))


def lstf_filter(
    mask: np.ndarray,
    vote_min: int = DEFAULT_VOTE_MIN,
    gap_tol: float = DEFAULT_GAP_TOL,
    len_min: float = DEFAULT_LEN_MIN,
    r_max: float = DEFAULT_R_MAX,
    trace_width: float = DEFAULT_TRACE_WIDTH,
    printed_dbar: bool = False,
) -> tuple[bool, float | None]:
    """Accept a region's edge mask when its stroke spacing is regular.

    Returns (passed, raw_regularity). Masks without at least two
    co-oriented segments fail with regularity None; degenerate spacing
    fails with infinite regularity. The threshold compares the regularity
    clamped to [0, 1] against `r_max`; the raw value is reported.
    """
    segments = hough_line_segments(
        mask, vote_min=vote_min, gap_tol=gap_tol, len_min=len_min, trace_width=trace_width
    )
    feature = extract_lstf(segments)
    if feature is None:
        return False, None
    raw = regularity(feature, printed_dbar=printed_dbar)
    return min(raw, 1.0) <= r_max, raw


def filter_regions(
    candidates: Sequence[CandidateRegion],
    gray: GrayFrame,
    *,
    sigma: int = DEFAULT_CONTRAST_SIGMA,
    min_separation: int = DEFAULT_PEAK_SEPARATION,
    r_max: float = DEFAULT_R_MAX,
    min_width: int = DEFAULT_MIN_REGION_W,
    min_height: int = DEFAULT_MIN_REGION_H,
    vote_min: int = DEFAULT_VOTE_MIN,
    gap_tol: float = DEFAULT_GAP_TOL,
    len_min: float = DEFAULT_LEN_MIN,
    trace_width: float = DEFAULT_TRACE_WIDTH,
    printed_dbar: bool = False,
    edge_mask: BinaryFrame | None = None,
    stages: Sequence[str] = FILTER_STAGES,
) -> list[FilterVerdict]:
    """Run the enabled filter stages over each candidate of one frame.

    Stages always run in size, contrast, lstf order; `stages` may name a
    subset, which can only grow the accepted set. `gray` must be the frame
    the candidates were localized on; accepted regions keep their boxes
    unchanged. The lstf stage needs the frame's binary edge mask; pass a
    precomputed one via `edge_mask` to avoid redundant work, otherwise it
    is derived from `gray` on demand.
    """
    unknown = set(stages) - set(FILTER_STAGES)
    if unknown:
        raise ContractError(f"unknown filter stages: {sorted(unknown)}")
    enabled = [s for s in FILTER_STAGES if s in stages]
    verdicts: list[FilterVerdict] = []
    mask_bits: np.ndarray | None = edge_mask.bits if edge_mask is not None else None
    for region in candidates:
        if region.frame_index != gray.index:
            raise ContractError(
                f"candidate frame {region.frame_index} does not match gray frame {gray.index}"
            )
        box = region.box
        if box.x < 0 or box.y < 0 or box.x2 > gray.width or box.y2 > gray.height:
            raise ContractError(f"candidate box {box} exceeds frame bounds")
        peak_distance: int | None = None
        raw_r: float | None = None
        failed_stage: str | None = None
        for stage in enabled:
            if stage == "size":
                if box.w < min_width or box.h < min_height:
                    failed_stage = "size"
            elif stage == "contrast":
                crop = gray.pixels[box.y : box.y2, box.x : box.x2]
                passed, peak_distance = contrast_filter(
                    crop, sigma=sigma, min_separation=min_separation
                )
                if not passed:
                    failed_stage = "contrast"
            else:
                if mask_bits is None:
                    mask_bits = binarize(sobel_edge_map(gray)).bits
                crop = mask_bits[box.y : box.y2, box.x : box.x2]
                passed, raw_r = lstf_filter(
                    crop,
                    vote_min=vote_min,
                    gap_tol=gap_tol,
                    len_min=len_min,
                    r_max=r_max,
                    trace_width=trace_width,
                    printed_dbar=printed_dbar,
                )
                if not passed:
                    failed_stage = "lstf"
            if failed_stage:
                break
        verdicts.append(
            FilterVerdict(
                region=region,
                accepted=failed_stage is None,
                rejection_stage=failed_stage,
                contrast_peak_distance=peak_distance,
                regularity=raw_r,
            )
        )
    return verdicts

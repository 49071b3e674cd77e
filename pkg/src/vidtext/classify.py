"""Semantic classification of detected regions against a visual grammar.

A detected box is first related spatially to each class region; classes
that coincide with, contain, or overlap the detection strongly enough stay
in play. Among those, the class whose sub-region colors best match the
frame wins, provided the mean color distance stays within the grammar's
alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .errors import ContractError, ValidationError
from .frames import HsvPixel, RgbFrame
from .geometry import Box, intersection_area
from .grammar import GrammarDescriptor, TextClass, dominant_hsv
from .localize import CandidateRegion


class MappingCase(str, Enum):
    """Spatial relation between a detected box and a class region."""

    EQUALITY = "equality"
    COVERING = "covering"
    PARTIAL_OVERLAP = "partial_overlap"
    DISJUNCTION = "disjunction"


@dataclass(frozen=True)
class ClassifiedRegion:
    """A detection after grammar matching.

    `final_box` equals the grammar class region for equality/covering
    matches (the grammar coordinates are authoritative there) and the
    detected box otherwise. Unclassified regions keep `class_id` None but
    still record the nearest class distance when one was measured.
    """

    frame_index: int
    detected_box: Box
    final_box: Box
    class_id: str | None
    label: str | None
    mapping: MappingCase
    overlap_ratio: float
    mean_distance: float | None


def spatial_mapping(
    detected: Box, class_region: Box
) -> tuple[MappingCase, float]:
    """Relate a detected box B to a class region A.

    Returns the mapping case and the overlap ratio area(A intersect B) /
    area(B). Equal boxes are EQUALITY; a detected box lying inside the
    class region is COVERING (the class region covers it, so the ratio is
    1); any other positive overlap is PARTIAL_OVERLAP — including the class
    region sitting inside a larger detection; otherwise DISJUNCTION with
    ratio 0.
    """
    inter = intersection_area(detected, class_region)
    ratio = inter / detected.area
    if detected == class_region:
        return MappingCase.EQUALITY, ratio
    if class_region.contains(detected):
        return MappingCase.COVERING, ratio
    if inter > 0:
        return MappingCase.PARTIAL_OVERLAP, ratio
    return MappingCase.DISJUNCTION, 0.0


def subregion_distance(a: HsvPixel, b: HsvPixel) -> float:
    """Euclidean distance between two HSV triples (hue treated linearly)."""
    return math.dist(a, b)


def mean_class_distance(
    frame: RgbFrame,
    text_class: TextClass,
    cache: dict | None = None,
) -> float:
    """Mean distance between the class sub-region colors and the frame.

    Each sub-region's dominant HSV is measured at its own (frame-absolute)
    box on `frame` and compared with the grammar value; the distances are
    averaged. `cache` may map (frame_index, box) to measured colors to
    avoid repeated work across classes.
    """
    total = 0.0
    for sub in text_class.subregions:
        key = (frame.index, sub.box)
        if cache is not None and key in cache:
            observed = cache[key]
        else:
            observed = dominant_hsv(frame, sub.box)
            if cache is not None:
                cache[key] = observed
        total += subregion_distance(observed, sub.hsv)
    return total / len(text_class.subregions)


def classify_region(
    frame: RgbFrame,
    detected_box: Box,
    grammar: GrammarDescriptor,
    alpha: float | None = None,
    overlap_min: float | None = None,
    cache: dict | None = None,
) -> ClassifiedRegion:
    """Assign the best-matching grammar class to one detected box.

    Classes are spatially gated first: equality and covering always
    qualify; partial overlap qualifies when the overlap ratio reaches
    `overlap_min`; disjoint classes never do. Among qualifying classes the
    smallest mean color distance wins (ties: grammar order) and the region
    is classified when that distance is at most `alpha`. `alpha` and
    `overlap_min` default to the grammar's values.
    """
    alpha = grammar.alpha if alpha is None else alpha
    overlap_min = grammar.overlap_min if overlap_min is None else overlap_min
    qualifying: list[tuple[TextClass, MappingCase, float]] = []
    best_rejected: tuple[MappingCase, float] | None = None
    for cls in grammar.classes:
        case, ratio = spatial_mapping(detected_box, cls.region)
        if case in (MappingCase.EQUALITY, MappingCase.COVERING) or (
            case is MappingCase.PARTIAL_OVERLAP and ratio >= overlap_min
        ):
            qualifying.append((cls, case, ratio))
        elif best_rejected is None or ratio > best_rejected[1]:
            best_rejected = (case, ratio)

    if not qualifying:
        case, ratio = best_rejected or (MappingCase.DISJUNCTION, 0.0)
        return ClassifiedRegion(
            frame_index=frame.index,
            detected_box=detected_box,
            final_box=detected_box,
            class_id=None,
            label=None,
            mapping=case,
            overlap_ratio=ratio,
            mean_distance=None,
        )

    best: tuple[TextClass, MappingCase, float] | None = None
    best_distance = math.inf
    for cls, case, ratio in qualifying:
        distance = mean_class_distance(frame, cls, cache=cache)
        if distance < best_distance:
            best, best_distance = (cls, case, ratio), distance
    assert best is not None
    cls, case, ratio = best
    if best_distance <= alpha:
        final = cls.region if case in (MappingCase.EQUALITY, MappingCase.COVERING) else detected_box
        return ClassifiedRegion(
            frame_index=frame.index,
            detected_box=detected_box,
            final_box=final,
            class_id=cls.id,
            label=cls.label,
            mapping=case,
            overlap_ratio=ratio,
            mean_distance=best_distance,
        )
    return ClassifiedRegion(
        frame_index=frame.index,
        detected_box=detected_box,
        final_box=detected_box,
        class_id=None,
        label=None,
        mapping=case,
        overlap_ratio=ratio,
        mean_distance=best_distance,
    )


def classify_all(
    regions: Sequence[CandidateRegion],
    frames: Mapping[int, RgbFrame] | Sequence[RgbFrame],
    grammar: GrammarDescriptor,
    alpha: float | None = None,
    overlap_min: float | None = None,
) -> list[ClassifiedRegion]:
    """Classify every detected region against the grammar.

    `frames` must contain every frame a region references, all at the
    grammar's frame size. Results are ordered by (frame index, x, y).
    """
    if not isinstance(frames, Mapping):
        frames = {f.index: f for f in frames}
    for frame in frames.values():
        if frame.width != grammar.frame_w or frame.height != grammar.frame_h:
            raise ValidationError(
                f"frame size {frame.width}x{frame.height} does not match "
                f"grammar size {grammar.frame_w}x{grammar.frame_h}"
            )
    cache: dict = {}
    results = []
    for region in regions:
        frame = frames.get(region.frame_index)
        if frame is None:
            raise ContractError(f"no frame loaded for index {region.frame_index}")
        results.append(
            classify_region(
                frame,
                region.box,
                grammar,
                alpha=alpha,
                overlap_min=overlap_min,
                cache=cache,
            )
        )
    results.sort(key=lambda r: (r.frame_index, r.detected_box.x, r.detected_box.y))
    return results

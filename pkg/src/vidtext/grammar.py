"""Visual grammar descriptors: the color layout signatures of text classes.

A grammar names the recurring overlay classes of one channel/program (score
banners, captions, logos, ...). Each class is a frame region plus a set of
sub-regions annotated with their dominant HSV color; classification later
compares freshly observed colors against these signatures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import ContractError, InputOutputError, ValidationError
from .frames import HsvPixel, RgbFrame, hsv_planes
from .geometry import Box

DEFAULT_ALPHA = 0.15
DEFAULT_OVERLAP_MIN = 0.8


@dataclass(frozen=True)
class SubRegionFeature:
    """One annotated sub-region: its box and dominant HSV color."""

    box: Box
    hsv: HsvPixel

    def __post_init__(self) -> None:
        h, s, v = self.hsv
        if not (0.0 <= h < 1.0 and 0.0 <= s <= 1.0 and 0.0 <= v <= 1.0):
            raise ContractError(f"hsv out of range: {self.hsv}")


@dataclass(frozen=True)
class TextClass:
    """A text class: identifier, display label, region and color sub-regions."""

    id: str
    label: str
    region: Box
    subregions: tuple[SubRegionFeature, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ContractError("text class id must be non-empty")
        if not self.subregions:
            raise ContractError(f"text class {self.id!r} needs at least one sub-region")


@dataclass(frozen=True)
class GrammarDescriptor:
    """The grammar of one broadcast source at a fixed frame size.

    `alpha` is the classification distance threshold, `overlap_min` the
    minimum overlap ratio for a partial spatial match. Sub-region boxes are
    frame-absolute and may extend outside their class region (side markers
    are common), but never outside the frame.
    """

    channel: str
    program: str
    frame_w: int
    frame_h: int
    alpha: float
    overlap_min: float
    classes: tuple[TextClass, ...]

    def __post_init__(self) -> None:
        if self.frame_w < 1 or self.frame_h < 1:
            raise ContractError("grammar frame size must be positive")
        if self.alpha < 0:
            raise ContractError(f"alpha must be >= 0, got {self.alpha}")
        if not 0.0 <= self.overlap_min <= 1.0:
            raise ContractError(f"overlap_min must be in [0, 1], got {self.overlap_min}")
        seen = set()
        frame = Box(0, 0, self.frame_w, self.frame_h)
        for cls in self.classes:
            if cls.id in seen:
                raise ContractError(f"duplicate text class id {cls.id!r}")
            seen.add(cls.id)
            if not frame.contains(cls.region):
                raise ContractError(f"class {cls.id!r} region exceeds the frame")
            for sub in cls.subregions:
                if not frame.contains(sub.box):
                    raise ContractError(f"class {cls.id!r} sub-region exceeds the frame")

    def find(self, class_id: str) -> TextClass:
        for cls in self.classes:
            if cls.id == class_id:
                return cls
        raise ContractError(f"unknown text class id {class_id!r}")


def dominant_hsv(frame: RgbFrame, box: Box) -> HsvPixel:
    """Dominant color of a frame region: the per-component mean HSV.

    Hue is averaged as a plain scalar (no circular treatment). Means are
    accumulated in exact rational arithmetic and rounded once, so the result
    is independent of pixel order and a constant-color region reproduces its
    color conversion bit for bit.
    """
    if box.x < 0 or box.y < 0 or box.x2 > frame.width or box.y2 > frame.height:
        raise ContractError(f"sub-region {box} exceeds frame bounds")
    crop = frame.pixels[box.y : box.y2, box.x : box.x2]
    h, s, v = hsv_planes(crop)
    n = box.area

    def exact_mean(plane) -> float:
        total = sum(map(Fraction, plane.ravel().tolist()), Fraction(0))
        return float(total / n)

    return HsvPixel(exact_mean(h), exact_mean(s), exact_mean(v))


def build_grammar_entry(
    frame: RgbFrame,
    class_id: str,
    label: str,
    region: Box,
    subregion_boxes: Sequence[Box],
) -> TextClass:
    """Measure the dominant HSV of each sub-region box on `frame` and
    assemble a TextClass ready to be added to a grammar."""
    subs = tuple(
        SubRegionFeature(box=b, hsv=dominant_hsv(frame, b)) for b in subregion_boxes
    )
    return TextClass(id=class_id, label=label, region=region, subregions=subs)


def grammar_to_dict(grammar: GrammarDescriptor) -> dict:
    return {
        "channel": grammar.channel,
        "program": grammar.program,
        "frame_w": grammar.frame_w,
        "frame_h": grammar.frame_h,
        "alpha": grammar.alpha,
        "overlap_min": grammar.overlap_min,
        "classes": [
            {
                "id": cls.id,
                "label": cls.label,
                "region": cls.region.to_dict(),
                "subregions": [
                    {**sub.box.to_dict(), "hsv": [sub.hsv.h, sub.hsv.s, sub.hsv.v]}
                    for sub in cls.subregions
                ],
            }
            for cls in grammar.classes
        ],
    }


def _require(data: dict, key: str, context: str):
    if key not in data:
        raise ValidationError(f"grammar {context} is missing key {key!r}")
    return data[key]


def grammar_from_dict(data: dict) -> GrammarDescriptor:
    """Validate a parsed grammar JSON object and build the descriptor."""
    if not isinstance(data, dict):
        raise ValidationError("grammar file must contain a JSON object")
    try:
        classes = []
        raw_classes = _require(data, "classes", "object")
        if not isinstance(raw_classes, list):
            raise ValidationError("grammar classes must be a list")
        for raw_cls in raw_classes:
            subs = []
            raw_subs = _require(raw_cls, "subregions", "class")
            if not isinstance(raw_subs, list):
                raise ValidationError("class subregions must be a list")
            for raw_sub in raw_subs:
                hsv = _require(raw_sub, "hsv", "sub-region")
                if not isinstance(hsv, list) or len(hsv) != 3:
                    raise ValidationError("sub-region hsv must be a 3-element list")
                subs.append(
                    SubRegionFeature(
                        box=Box.from_dict(raw_sub),
                        hsv=HsvPixel(float(hsv[0]), float(hsv[1]), float(hsv[2])),
                    )
                )
            classes.append(
                TextClass(
                    id=str(_require(raw_cls, "id", "class")),
                    label=str(_require(raw_cls, "label", "class")),
                    region=Box.from_dict(_require(raw_cls, "region", "class")),
                    subregions=tuple(subs),
                )
            )
        return GrammarDescriptor(
            channel=str(_require(data, "channel", "object")),
            program=str(_require(data, "program", "object")),
            frame_w=int(_require(data, "frame_w", "object")),
            frame_h=int(_require(data, "frame_h", "object")),
            alpha=float(_require(data, "alpha", "object")),
            overlap_min=float(_require(data, "overlap_min", "object")),
            classes=tuple(classes),
        )
    except ContractError as exc:
        raise ValidationError(f"invalid grammar: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed grammar value: {exc}") from exc


def load_grammar(path: str | Path) -> GrammarDescriptor:
    """Read and validate a grammar JSON file."""
    path = Path(path)
    if not path.is_file():
        raise InputOutputError(f"grammar file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"grammar file {path} is not valid JSON: {exc}") from exc
    return grammar_from_dict(data)


def save_grammar(path: str | Path, grammar: GrammarDescriptor) -> None:
    Path(path).write_text(json.dumps(grammar_to_dict(grammar), indent=2, sort_keys=True) + "\n")

"""Table-of-contents assembly from classified detections.

Repeated sightings of the same overlay within a short frame window are
collapsed to their first occurrence; the survivors become per-class anchor
lists, rendered as machine-readable JSON and a small static HTML page.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .classify import ClassifiedRegion
from .errors import ContractError, ValidationError
from .frames import RgbFrame, write_image
from .geometry import Box, iou
from .grammar import GrammarDescriptor

DEFAULT_GAP_MAX = 25
DEFAULT_IOU_MIN = 0.7


@dataclass(frozen=True)
class Anchor:
    """One table-of-contents entry point: a frame and a box, optionally a
    thumbnail path relative to the TOC file."""

    frame: int
    box: Box
    thumb: str | None = None

    def to_dict(self) -> dict:
        return {"frame": self.frame, "box": self.box.to_dict(), "thumb": self.thumb}

    @classmethod
    def from_dict(cls, data: dict) -> "Anchor":
        return cls(
            frame=int(data["frame"]),
            box=Box.from_dict(data["box"]),
            thumb=data.get("thumb"),
        )


@dataclass(frozen=True)
class TocEntry:
    class_id: str
    label: str
    anchors: tuple[Anchor, ...]


@dataclass(frozen=True)
class Toc:
    video: str
    entries: tuple[TocEntry, ...]
    unclassified: tuple[Anchor, ...]


def deduplicate_anchors(
    classified: Sequence[ClassifiedRegion],
    gap_max: int = DEFAULT_GAP_MAX,
    iou_min: float = DEFAULT_IOU_MIN,
) -> list[ClassifiedRegion]:
    """Drop re-detections of an overlay that is still on screen.

    Within each class (and within the unclassified pool), detections are
    scanned in frame order; one is dropped when it lies within `gap_max`
    frames of the previously kept detection of that class and its final box
    overlaps that detection's with IoU at least `iou_min`. The earliest
    sighting of each run survives.
    """
    if gap_max < 0:
        raise ContractError(f"gap_max must be >= 0, got {gap_max}")
    if not 0.0 <= iou_min <= 1.0:
        raise ContractError(f"iou_min must be in [0, 1], got {iou_min}")
    last_kept: dict[str | None, ClassifiedRegion] = {}
    kept: list[ClassifiedRegion] = []
    ordered = sorted(
        classified, key=lambda r: (r.frame_index, r.final_box.x, r.final_box.y)
    )
    for region in ordered:
        prev = last_kept.get(region.class_id)
        if (
            prev is not None
            and region.frame_index - prev.frame_index <= gap_max
            and iou(region.final_box, prev.final_box) >= iou_min
        ):
            continue
        last_kept[region.class_id] = region
        kept.append(region)
    return kept


def build_toc(
    classified: Sequence[ClassifiedRegion],
    grammar: GrammarDescriptor,
    video: str,
    gap_max: int = DEFAULT_GAP_MAX,
    iou_min: float = DEFAULT_IOU_MIN,
) -> Toc:
    """Assemble the thematic table of contents of one video.

    Entries follow grammar order and only classes with at least one anchor
    appear; anchors that no grammar class claimed are listed separately.
    """
    kept = deduplicate_anchors(classified, gap_max=gap_max, iou_min=iou_min)
    by_class: dict[str | None, list[Anchor]] = {}
    for region in kept:
        by_class.setdefault(region.class_id, []).append(
            Anchor(frame=region.frame_index, box=region.final_box)
        )
    entries = tuple(
        TocEntry(class_id=cls.id, label=cls.label, anchors=tuple(by_class[cls.id]))
        for cls in grammar.classes
        if by_class.get(cls.id)
    )
    return Toc(
        video=video,
        entries=entries,
        unclassified=tuple(by_class.get(None, ())),
    )


def toc_to_dict(toc: Toc) -> dict:
    return {
        "video": toc.video,
        "entries": [
            {
                "class": e.class_id,
                "label": e.label,
                "anchors": [a.to_dict() for a in e.anchors],
            }
            for e in toc.entries
        ],
        "unclassified": [a.to_dict() for a in toc.unclassified],
    }


def toc_from_dict(data: dict) -> Toc:
    try:
        entries = tuple(
            TocEntry(
                class_id=str(e["class"]),
                label=str(e["label"]),
                anchors=tuple(Anchor.from_dict(a) for a in e["anchors"]),
            )
            for e in data["entries"]
        )
        unclassified = tuple(Anchor.from_dict(a) for a in data["unclassified"])
        return Toc(video=str(data["video"]), entries=entries, unclassified=unclassified)
    except (KeyError, TypeError, ValueError, ContractError) as exc:
        raise ValidationError(f"malformed table-of-contents object: {exc}") from exc


def _render_html(toc: Toc) -> str:
    lines = [
        "<!DOCTYPE html>",
        "<html><head><meta charset='utf-8'>",
        f"<title>{html.escape(toc.video)} — table of contents</title>",
        "</head><body>",
        f"<h1>{html.escape(toc.video)}</h1>",
    ]
    sections: list[tuple[str, Sequence[Anchor]]] = [
        (f"{e.label} ({e.class_id})", e.anchors) for e in toc.entries
    ]
    if toc.unclassified:
        sections.append(("unclassified", toc.unclassified))
    for title, anchors in sections:
        lines.append(f"<h2>{html.escape(title)}</h2>")
        lines.append("<ul>")
        for a in anchors:
            b = a.box
            item = f"frame {a.frame} — box ({b.x}, {b.y}, {b.w}, {b.h})"
            if a.thumb:
                item += f" <img src='{html.escape(a.thumb)}' alt=''>"
            lines.append(f"<li>{item}</li>")
        lines.append("</ul>")
    lines.append("</body></html>")
    return "\n".join(lines) + "\n"


def _with_thumbnails(
    toc: Toc, frames: Mapping[int, RgbFrame], out_dir: Path
) -> Toc:
    thumb_dir = out_dir / "thumbs"
    thumb_dir.mkdir(parents=True, exist_ok=True)

    def write_thumb(anchor: Anchor, prefix: str) -> Anchor:
        frame = frames.get(anchor.frame)
        if frame is None:
            raise ContractError(f"no frame loaded for thumbnail at index {anchor.frame}")
        b = anchor.box
        crop = frame.pixels[b.y : b.y2, b.x : b.x2]
        name = f"{prefix}_{anchor.frame:06d}_{b.x}_{b.y}.png"
        write_image(thumb_dir / name, crop)
        return replace(anchor, thumb=f"thumbs/{name}")

    entries = tuple(
        replace(e, anchors=tuple(write_thumb(a, e.class_id) for a in e.anchors))
        for e in toc.entries
    )
    unclassified = tuple(write_thumb(a, "unclassified") for a in toc.unclassified)
    return Toc(video=toc.video, entries=entries, unclassified=unclassified)


def render_outputs(
    toc: Toc,
    out_dir: str | Path,
    frames: Mapping[int, RgbFrame] | None = None,
) -> Toc:
    """Write toc.json and toc.html under `out_dir`.

    When `frames` is given, anchor thumbnails are cropped into
    out_dir/thumbs and referenced from both outputs. Returns the TOC that
    was written (with thumbnail paths filled in).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if frames is not None:
        toc = _with_thumbnails(toc, frames, out_dir)
    (out_dir / "toc.json").write_text(
        json.dumps(toc_to_dict(toc), indent=2, sort_keys=True) + "\n"
    )
    (out_dir / "toc.html").write_text(_render_html(toc))
    return toc


def load_toc(path: str | Path) -> Toc:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ValidationError(f"table-of-contents file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    return toc_from_dict(data)

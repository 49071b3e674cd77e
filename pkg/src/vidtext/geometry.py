"""Axis-aligned integer boxes and the overlap arithmetic used across stages."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContractError


@dataclass(frozen=True, order=True)
class Box:
    """Axis-aligned rectangle in pixel coordinates, origin at the top-left.

    `x`, `y` locate the top-left corner; `w`, `h` must be positive. The box
    covers columns [x, x+w) and rows [y, y+h).
    """

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise ContractError(f"box must have positive size, got {self.w}x{self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def x2(self) -> int:
        """Exclusive right edge."""
        return self.x + self.w

    @property
    def y2(self) -> int:
        """Exclusive bottom edge."""
        return self.y + self.h

    def contains(self, other: "Box") -> bool:
        return (
            self.x <= other.x
            and self.y <= other.y
            and self.x2 >= other.x2
            and self.y2 >= other.y2
        )

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, data: dict) -> "Box":
        try:
            return cls(int(data["x"]), int(data["y"]), int(data["w"]), int(data["h"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError(f"malformed box object: {data!r}") from exc


def intersection_area(a: Box, b: Box) -> int:
    """Area of the overlap of two boxes, 0 when they are disjoint."""
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0
    return iw * ih


def union_box(a: Box, b: Box) -> Box:
    """Smallest box enclosing both inputs."""
    x = min(a.x, b.x)
    y = min(a.y, b.y)
    return Box(x, y, max(a.x2, b.x2) - x, max(a.y2, b.y2) - y)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    inter = intersection_area(a, b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)

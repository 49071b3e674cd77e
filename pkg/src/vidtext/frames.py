"""Frame loading, color conversion and the raster value types.

Frames are numpy arrays wrapped in small dataclasses that carry the frame
index alongside the pixels. Sequences are read from a directory of numbered
image files; numbering may start anywhere but must be consecutive.
"""

from __future__ import annotations

import colorsys
import re
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image

from .errors import ContractError, FrameSequenceError, InputOutputError

DEFAULT_FRAME_PATTERN = "frame_%06d.png"

# BT.601 luma weights scaled to integers over 1000.
_LUMA_R = 299
_LUMA_G = 587
_LUMA_B = 114


class HsvPixel(NamedTuple):
    """Hue, saturation and value, each in [0, 1]; hue is a fraction of a turn."""

    h: float
    s: float
    v: float


@dataclass(frozen=True, eq=False)
class RgbFrame:
    """One color frame: `pixels` is a (height, width, 3) uint8 array."""

    index: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ContractError(f"frame index must be >= 0, got {self.index}")
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ContractError("RgbFrame expects a (h, w, 3) uint8 array")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class GrayFrame:
    """One grayscale frame: `pixels` is a (height, width) uint8 array."""

    index: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ContractError(f"frame index must be >= 0, got {self.index}")
        p = self.pixels
        if p.ndim != 2 or p.dtype != np.uint8:
            raise ContractError("GrayFrame expects a (h, w) uint8 array")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def to_grayscale(frame: RgbFrame) -> GrayFrame:
    """Convert a color frame to BT.601 luma.

    gray = round(0.299 r + 0.587 g + 0.114 b), computed in exact integer
    arithmetic with halves rounding up, so results are platform independent.
    """
    p = frame.pixels.astype(np.uint32)
    luma = _LUMA_R * p[:, :, 0] + _LUMA_G * p[:, :, 1] + _LUMA_B * p[:, :, 2]
    gray = ((luma + 500) // 1000).astype(np.uint8)
    return GrayFrame(index=frame.index, pixels=gray)


def rgb_to_hsv(r: int, g: int, b: int) -> HsvPixel:
    """Convert one 8-bit RGB triple to hexcone HSV.

    Achromatic inputs map to h = 0, s = 0. Hue is stored as a fraction of a
    full turn, so red is 0.0 and green is 1/3.
    """
    for name, c in (("r", r), ("g", g), ("b", b)):
        if not 0 <= c <= 255:
            raise ContractError(f"channel {name} out of range: {c}")
    h, s, v = colorsys.rgb_to_hsv(r / 255.0, g / 255.0, b / 255.0)
    return HsvPixel(h, s, v)


def hsv_planes(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hexcone conversion of a (h, w, 3) uint8 array.

    Returns float64 (hue, saturation, value) planes matching `rgb_to_hsv`
    pixel for pixel.
    """
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise ContractError("hsv_planes expects a (h, w, 3) array")
    rgb = pixels.astype(np.float64) / 255.0
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    maxc = np.maximum(np.maximum(r, g), b)
    minc = np.minimum(np.minimum(r, g), b)
    v = maxc
    spread = maxc - minc
    chromatic = spread > 0.0
    safe_max = np.where(maxc > 0.0, maxc, 1.0)
    s = np.where(chromatic, spread / safe_max, 0.0)
    safe_spread = np.where(chromatic, spread, 1.0)
    rc = (maxc - r) / safe_spread
    gc = (maxc - g) / safe_spread
    bc = (maxc - b) / safe_spread
    # Branch order mirrors the scalar conversion: red wins ties, then green.
    h = np.where(r == maxc, bc - gc, np.where(g == maxc, 2.0 + rc - bc, 4.0 + gc - rc))
    h = np.where(chromatic, (h / 6.0) % 1.0, 0.0)
    return h, s, v


def load_image(path: str | Path) -> np.ndarray:
    """Decode one image file into a (h, w, 3) uint8 array."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except FileNotFoundError as exc:
        raise InputOutputError(f"image file not found: {path}") from exc
    except Exception as exc:
        raise InputOutputError(f"cannot decode image file {path}: {exc}") from exc


def write_image(path: str | Path, pixels: np.ndarray) -> None:
    """Encode a uint8 array (grayscale 2-D or RGB 3-D) to `path`.

    The container is chosen from the file suffix; `.pgm` writes the binary
    P5 variant used for stage dumps.
    """
    path = Path(path)
    arr = np.ascontiguousarray(pixels)
    if arr.dtype != np.uint8:
        raise ContractError("write_image expects uint8 pixels")
    try:
        Image.fromarray(arr).save(path)
    except Exception as exc:
        raise InputOutputError(f"cannot write image file {path}: {exc}") from exc


def _pattern_to_regex(pattern: str) -> re.Pattern:
    fields = re.findall(r"%0?\d*d", pattern)
    if len(fields) != 1:
        raise ContractError(
            f"frame pattern must contain exactly one integer field, got {pattern!r}"
        )
    field = fields[0]
    head, tail = pattern.split(field, 1)
    return re.compile(re.escape(head) + r"(\d+)" + re.escape(tail) + r"\Z")


def load_frame_sequence(
    directory: str | Path, pattern: str = DEFAULT_FRAME_PATTERN
) -> list[RgbFrame]:
    """Load every frame in `directory` whose name matches `pattern`.

    File numbers may start at any value but must be consecutive; a gap
    raises FrameSequenceError naming the missing file number. Returned
    frames are re-indexed 0..n-1 in sequence order.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InputOutputError(f"frame directory not found: {directory}")
    regex = _pattern_to_regex(pattern)
    numbered: list[tuple[int, Path]] = []
    for entry in directory.iterdir():
        m = regex.match(entry.name)
        if m:
            numbered.append((int(m.group(1)), entry))
    if not numbered:
        raise FrameSequenceError(
            f"no files matching pattern {pattern!r} in {directory}"
        )
    numbered.sort()
    numbers = [n for n, _ in numbered]
    if len(set(numbers)) != len(numbers):
        dup = next(n for i, n in enumerate(numbers[1:], 1) if n == numbers[i - 1])
        raise FrameSequenceError(f"duplicate frame number {dup} in {directory}")
    for prev, cur in zip(numbers, numbers[1:]):
        if cur != prev + 1:
            raise FrameSequenceError(f"missing frame index {prev + 1} in {directory}")
    frames: list[RgbFrame] = []
    shape: tuple[int, int] | None = None
    for rank, (_, path) in enumerate(numbered):
        pixels = load_image(path)
        if shape is None:
            shape = pixels.shape[:2]
        elif pixels.shape[:2] != shape:
            raise FrameSequenceError(
                f"frame {path.name} has size {pixels.shape[1]}x{pixels.shape[0]}, "
                f"expected {shape[1]}x{shape[0]}"
            )
        frames.append(RgbFrame(index=rank, pixels=pixels))
    return frames

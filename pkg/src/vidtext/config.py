"""Pipeline configuration: one JSON file drives every subcommand.

Unknown keys are rejected so typos fail loudly; CLI flags override file
values. A canonical digest of the effective configuration is recorded in
every run manifest.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InputOutputError, ValidationError
from .filtering import FILTER_STAGES

DUMPABLE_STAGES = ("edges", "binary", "diff", "leaves", "regions", "verdicts")


@dataclass(frozen=True)
class PipelineConfig:
    frames_dir: str | None = None
    grammar_file: str | None = None
    ground_truth_file: str | None = None
    out_dir: str = "out"
    frame_pattern: str = "frame_%06d.png"
    video_name: str | None = None
    split_threshold: float = 0.10
    min_block_size: int = 8
    density_eps: float = 0.15
    contrast_sigma: int = 110
    peak_separation: int = 8
    r_max: float = 0.2
    printed_dbar: bool = False
    vote_min: int = 8
    gap_tol: float = 2.0
    len_min: float = 4.0
    trace_width: float = 1.0
    min_region_w: int = 16
    min_region_h: int = 8
    alpha: float | None = None
    overlap_min: float | None = None
    gap_max: int = 25
    iou_min: float = 0.7
    min_intersection: float = 0.85
    emit_thumbnails: bool = False
    workers: int = 1
    seed: int = 0
    dump_stages: tuple[str, ...] = ()
    synth: dict | None = None

    def __post_init__(self) -> None:
        checks = [
            (self.split_threshold >= 0, "split_threshold must be >= 0"),
            (self.min_block_size >= 1, "min_block_size must be >= 1"),
            (self.density_eps >= 0, "density_eps must be >= 0"),
            (0 <= self.contrast_sigma <= 255, "contrast_sigma must be in [0, 255]"),
            (self.peak_separation >= 1, "peak_separation must be >= 1"),
            (self.r_max >= 0, "r_max must be >= 0"),
            (self.vote_min >= 1, "vote_min must be >= 1"),
            (self.gap_tol >= 0, "gap_tol must be >= 0"),
            (self.len_min >= 0, "len_min must be >= 0"),
            (self.trace_width >= 0.5, "trace_width must be >= 0.5"),
            (self.min_region_w >= 1 and self.min_region_h >= 1,
             "minimum region size must be >= 1"),
            (self.alpha is None or self.alpha >= 0, "alpha must be >= 0"),
            (self.overlap_min is None or 0 <= self.overlap_min <= 1,
             "overlap_min must be in [0, 1]"),
            (self.gap_max >= 0, "gap_max must be >= 0"),
            (0 <= self.iou_min <= 1, "iou_min must be in [0, 1]"),
            (0 < self.min_intersection <= 1, "min_intersection must be in (0, 1]"),
            (self.workers >= 1, "workers must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ValidationError(message)
        unknown = set(self.dump_stages) - set(DUMPABLE_STAGES)
        if unknown:
            raise ValidationError(
                f"unknown dump stages {sorted(unknown)}; valid: {list(DUMPABLE_STAGES)}"
            )

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["dump_stages"] = list(self.dump_stages)
        return data

    def digest(self) -> str:
        """sha256 over the canonical JSON form of the configuration."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def filter_kwargs(self) -> dict:
        """Keyword arguments for filter_regions drawn from this config."""
        return {
            "sigma": self.contrast_sigma,
            "min_separation": self.peak_separation,
            "r_max": self.r_max,
            "min_width": self.min_region_w,
            "min_height": self.min_region_h,
            "vote_min": self.vote_min,
            "gap_tol": self.gap_tol,
            "len_min": self.len_min,
            "trace_width": self.trace_width,
            "printed_dbar": self.printed_dbar,
        }


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def load_config(path: str | Path) -> PipelineConfig:
    """Read and validate a configuration JSON file."""
    path = Path(path)
    if not path.is_file():
        raise InputOutputError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config file must contain a JSON object")
    unknown = set(data) - set(_FIELD_TYPES)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    if "dump_stages" in data:
        if not isinstance(data["dump_stages"], list):
            raise ValidationError("dump_stages must be a list of stage names")
        data["dump_stages"] = tuple(str(s) for s in data["dump_stages"])
    try:
        return PipelineConfig(**data)
    except TypeError as exc:
        raise ValidationError(f"malformed config value: {exc}") from exc


def apply_overrides(config: PipelineConfig, **overrides) -> PipelineConfig:
    """Return a copy of `config` with every non-None override applied."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    bad = set(changes) - set(_FIELD_TYPES)
    if bad:
        raise ValidationError(f"unknown config overrides: {sorted(bad)}")
    if not changes:
        return config
    return dataclasses.replace(config, **changes)


# Re-exported so callers can validate stage subsets against one source.
__all__ = [
    "PipelineConfig",
    "load_config",
    "apply_overrides",
    "DUMPABLE_STAGES",
    "FILTER_STAGES",
]

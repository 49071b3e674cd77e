"""Quantitative evaluation against ground-truth text occurrences.

Detection quality follows the usual recall/precision/false-alarm triple; a
detection counts as correct when it covers at least a fixed share of a
ground-truth box's area while that occurrence is on screen. Identification
quality measures how many of the extracted regions also received the right
class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

from .errors import ContractError, InputOutputError, ValidationError
from .geometry import Box, intersection_area

DEFAULT_MIN_INTERSECTION = 0.85


class Detection(NamedTuple):
    """A detected text region, optionally carrying its assigned class."""

    frame: int
    box: Box
    class_id: str | None = None


@dataclass(frozen=True)
class GroundTruthRegion:
    """One annotated text occurrence: its frame span, box and class."""

    first_frame: int
    last_frame: int
    box: Box
    class_id: str | None = None

    def __post_init__(self) -> None:
        if self.first_frame < 0 or self.last_frame < self.first_frame:
            raise ContractError(
                f"invalid frame span [{self.first_frame}, {self.last_frame}]"
            )


@dataclass(frozen=True)
class Correspondence:
    """One-to-one assignment between detections and ground-truth regions.

    `matches` holds (detection index, truth index, coverage ratio) triples;
    `false_detections` the unmatched detection indices; `missed` the
    unmatched truth indices.
    """

    matches: tuple[tuple[int, int, float], ...]
    false_detections: tuple[int, ...]
    missed: tuple[int, ...]
    detected_total: int
    truth_total: int


class IdentificationMetrics(NamedTuple):
    txti: float | None
    txtni: float | None
    identified: int
    total: int


@dataclass(frozen=True)
class ReportCounts:
    ground_truth_total: int
    detected_total: int
    correct: int
    wrong: int
    identified: int


@dataclass(frozen=True)
class EvalReport:
    recall: float
    precision: float
    false_alarm: float
    txti: float | None
    txtni: float | None
    counts: ReportCounts

    def to_dict(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "false_alarm": self.false_alarm,
            "txti": self.txti,
            "txtni": self.txtni,
            "counts": {
                "ground_truth_total": self.counts.ground_truth_total,
                "detected_total": self.counts.detected_total,
                "correct": self.counts.correct,
                "wrong": self.counts.wrong,
                "identified": self.counts.identified,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        try:
            c = data["counts"]
            return cls(
                recall=float(data["recall"]),
                precision=float(data["precision"]),
                false_alarm=float(data["false_alarm"]),
                txti=None if data["txti"] is None else float(data["txti"]),
                txtni=None if data["txtni"] is None else float(data["txtni"]),
                counts=ReportCounts(
                    ground_truth_total=int(c["ground_truth_total"]),
                    detected_total=int(c["detected_total"]),
                    correct=int(c["correct"]),
                    wrong=int(c["wrong"]),
                    identified=int(c["identified"]),
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed evaluation report: {exc}") from exc


def coverage_ratio(detection: Detection, truth: GroundTruthRegion) -> float:
    """Share of the ground-truth box area covered by the detection box."""
    return intersection_area(detection.box, truth.box) / truth.box.area


def match_detections(
    detections: Sequence[Detection],
    truths: Sequence[GroundTruthRegion],
    min_intersection: float = DEFAULT_MIN_INTERSECTION,
) -> Correspondence:
    """Greedy one-to-one matching of detections to ground-truth regions.

    A pair is eligible when the detection's frame lies within the truth's
    span and the detection covers at least `min_intersection` of the truth
    box's area. Pairs are taken by descending coverage ratio; ties break on
    the detection's (frame, x, y) and then the truth's content, so the
    outcome does not depend on input order.
    """
    if not 0.0 < min_intersection <= 1.0:
        raise ContractError(
            f"min_intersection must be in (0, 1], got {min_intersection}"
        )
    eligible: list[tuple[tuple, int, int]] = []
    for d_idx, det in enumerate(detections):
        for t_idx, truth in enumerate(truths):
            if not truth.first_frame <= det.frame <= truth.last_frame:
                continue
            ratio = coverage_ratio(det, truth)
            if ratio >= min_intersection:
                key = (
                    -ratio,
                    det.frame,
                    det.box.x,
                    det.box.y,
                    det.box.w,
                    det.box.h,
                    truth.first_frame,
                    truth.box.x,
                    truth.box.y,
                    truth.box.w,
                    truth.box.h,
                )
                eligible.append((key, d_idx, t_idx))
    eligible.sort(key=lambda e: (e[0], e[1], e[2]))
    used_d: set[int] = set()
    used_t: set[int] = set()
    matches: list[tuple[int, int, float]] = []
    for key, d_idx, t_idx in eligible:
        if d_idx in used_d or t_idx in used_t:
            continue
        used_d.add(d_idx)
        used_t.add(t_idx)
        matches.append((d_idx, t_idx, -key[0]))
    matches.sort()
    return Correspondence(
        matches=tuple(matches),
        false_detections=tuple(i for i in range(len(detections)) if i not in used_d),
        missed=tuple(i for i in range(len(truths)) if i not in used_t),
        detected_total=len(detections),
        truth_total=len(truths),
    )


def detection_metrics(corr: Correspondence) -> tuple[float, float, float]:
    """(recall, precision, false_alarm) of a correspondence.

    recall = correct / ground truth count (1.0 when nothing was annotated);
    precision = correct / detections and false_alarm = wrong / detections,
    with the empty-detection convention precision = 1.0, false_alarm = 0.0.
    """
    correct = len(corr.matches)
    wrong = len(corr.false_detections)
    recall = 1.0 if corr.truth_total == 0 else correct / corr.truth_total
    if corr.detected_total == 0:
        return recall, 1.0, 0.0
    return recall, correct / corr.detected_total, wrong / corr.detected_total


def identification_metrics(
    detections: Sequence[Detection],
    truths: Sequence[GroundTruthRegion],
    min_intersection: float = DEFAULT_MIN_INTERSECTION,
) -> IdentificationMetrics:
    """Share of extracted regions that carry the correct class.

    A detection is identified when it matches a ground-truth region and
    both carry the same non-null class. The denominator is every extracted
    region; with no extractions both rates are undefined (None).
    """
    corr = match_detections(detections, truths, min_intersection=min_intersection)
    identified = sum(
        1
        for d_idx, t_idx, _ in corr.matches
        if detections[d_idx].class_id is not None
        and detections[d_idx].class_id == truths[t_idx].class_id
    )
    total = len(detections)
    if total == 0:
        return IdentificationMetrics(None, None, 0, 0)
    return IdentificationMetrics(
        identified / total, (total - identified) / total, identified, total
    )


def evaluate(
    detections: Sequence[Detection],
    truths: Sequence[GroundTruthRegion],
    min_intersection: float = DEFAULT_MIN_INTERSECTION,
    classified: Sequence[Detection] | None = None,
) -> EvalReport:
    """Full evaluation: detection metrics, plus identification metrics when
    classified detections are supplied."""
    corr = match_detections(detections, truths, min_intersection=min_intersection)
    recall, precision, false_alarm = detection_metrics(corr)
    if classified is None:
        ident = IdentificationMetrics(None, None, 0, len(detections))
    else:
        ident = identification_metrics(
            classified, truths, min_intersection=min_intersection
        )
    return EvalReport(
        recall=recall,
        precision=precision,
        false_alarm=false_alarm,
        txti=ident.txti,
        txtni=ident.txtni,
        counts=ReportCounts(
            ground_truth_total=corr.truth_total,
            detected_total=corr.detected_total,
            correct=len(corr.matches),
            wrong=len(corr.false_detections),
            identified=ident.identified,
        ),
    )


def load_ground_truth(path: str | Path) -> list[GroundTruthRegion]:
    """Read a ground-truth JSON file: a list of occurrence objects."""
    path = Path(path)
    if not path.is_file():
        raise InputOutputError(f"ground truth file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"ground truth file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise ValidationError("ground truth file must contain a JSON list")
    out = []
    for row in data:
        try:
            out.append(
                GroundTruthRegion(
                    first_frame=int(row["first_frame"]),
                    last_frame=int(row["last_frame"]),
                    box=Box.from_dict(row["box"]),
                    class_id=None if row.get("class") is None else str(row["class"]),
                )
            )
        except (KeyError, TypeError, ValueError, ContractError) as exc:
            raise ValidationError(f"malformed ground truth row {row!r}: {exc}") from exc
    return out


def save_ground_truth(path: str | Path, truths: Sequence[GroundTruthRegion]) -> None:
    rows = [
        {
            "first_frame": t.first_frame,
            "last_frame": t.last_frame,
            "box": t.box.to_dict(),
            "class": t.class_id,
        }
        for t in truths
    ]
    Path(path).write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")

"""Evaluation metrics: matching, detection rates, identification rates."""

import random

import numpy as np
import pytest

from oracles import match_optimal
from vidtext.errors import ContractError, InputOutputError, ValidationError
from vidtext.evaluate import (
    DEFAULT_MIN_INTERSECTION,
    Detection,
    EvalReport,
    GroundTruthRegion,
    coverage_ratio,
    detection_metrics,
    evaluate,
    identification_metrics,
    load_ground_truth,
    match_detections,
    save_ground_truth,
)
from vidtext.geometry import Box

TRUTH_BOX = Box(20, 20, 40, 20)


def truth(first=0, last=100, box=TRUTH_BOX, class_id="banner"):
    return GroundTruthRegion(first_frame=first, last_frame=last, box=box, class_id=class_id)


class TestCoverage:
    def test_full_and_zero(self):
        det = Detection(frame=5, box=TRUTH_BOX)
        assert coverage_ratio(det, truth()) == 1.0
        assert coverage_ratio(Detection(frame=5, box=Box(0, 0, 5, 5)), truth()) == 0.0

    def test_partial_is_truth_relative(self):
        det = Detection(frame=5, box=Box(20, 20, 20, 20))  # covers half the width
        assert coverage_ratio(det, truth()) == pytest.approx(0.5)
        # A huge detection still has ratio 1: denominator is the truth area.
        huge = Detection(frame=5, box=Box(0, 0, 100, 100))
        assert coverage_ratio(huge, truth()) == 1.0


class TestMatching:
    def test_simple_one_to_one(self):
        dets = [Detection(frame=5, box=TRUTH_BOX)]
        corr = match_detections(dets, [truth()])
        assert corr.matches == ((0, 0, 1.0),)
        assert corr.false_detections == () and corr.missed == ()

    def test_frame_span_gates_eligibility(self):
        dets = [Detection(frame=150, box=TRUTH_BOX)]
        corr = match_detections(dets, [truth(first=0, last=100)])
        assert corr.matches == ()
        assert corr.false_detections == (0,) and corr.missed == (0,)
        # Span endpoints count.
        for frame in (0, 100):
            corr = match_detections([Detection(frame=frame, box=TRUTH_BOX)], [truth()])
            assert len(corr.matches) == 1

    def test_coverage_threshold_gates_eligibility(self):
        # 84% coverage: 40x20 truth, detection misses a 4-wide stripe plus
        # a bit more -> use a 33-wide overlap = 0.825 < 0.85.
        det = Detection(frame=5, box=Box(27, 20, 33, 20))
        corr = match_detections([det], [truth()])
        assert corr.matches == ()
        det = Detection(frame=5, box=Box(24, 20, 36, 20))  # 0.9
        corr = match_detections([det], [truth()])
        assert len(corr.matches) == 1

    def test_threshold_boundary_is_inclusive(self):
        det = Detection(frame=5, box=Box(26, 20, 34, 20))  # exactly 0.85
        assert coverage_ratio(det, truth()) == pytest.approx(0.85)
        corr = match_detections([det], [truth()])
        assert len(corr.matches) == 1

    def test_one_truth_cannot_absorb_two_detections(self):
        dets = [Detection(frame=5, box=TRUTH_BOX), Detection(frame=6, box=TRUTH_BOX)]
        corr = match_detections(dets, [truth()])
        assert len(corr.matches) == 1
        assert len(corr.false_detections) == 1

    def test_greedy_prefers_higher_coverage(self):
        good = Detection(frame=5, box=TRUTH_BOX)
        okay = Detection(frame=5, box=Box(22, 20, 38, 20))  # 0.95
        corr = match_detections([okay, good], [truth()])
        matched = {(d, t) for d, t, _ in corr.matches}
        assert matched == {(1, 0)}

    def test_input_order_invariance(self):
        truths = [
            truth(box=Box(10, 10, 30, 15), class_id="a"),
            truth(box=Box(50, 40, 30, 15), class_id="b"),
        ]
        dets = [
            Detection(frame=3, box=Box(10, 10, 30, 15)),
            Detection(frame=4, box=Box(50, 40, 30, 15)),
            Detection(frame=9, box=Box(10, 10, 30, 15)),
        ]
        base = match_detections(dets, truths)
        matched_pairs = {
            (dets[d], truths[t], r) for d, t, r in base.matches
        }
        rng = random.Random(4)
        for _ in range(10):
            d_perm = list(range(len(dets)))
            t_perm = list(range(len(truths)))
            rng.shuffle(d_perm)
            rng.shuffle(t_perm)
            shuffled = match_detections(
                [dets[i] for i in d_perm], [truths[i] for i in t_perm]
            )
            pairs = {
                (dets[d_perm[d]], truths[t_perm[t]], r)
                for d, t, r in shuffled.matches
            }
            assert pairs == matched_pairs

    def test_greedy_never_beats_optimal_but_stays_close_on_small_instances(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            truths = [
                truth(box=Box(int(x), int(y), 20, 10), class_id=None)
                for x, y in rng.integers(0, 60, (int(rng.integers(1, 4)), 2))
            ]
            dets = [
                Detection(frame=5, box=Box(int(x), int(y), 20, 10))
                for x, y in rng.integers(0, 60, (int(rng.integers(0, 6)), 2))
            ]
            greedy = match_detections(dets, truths)
            best = match_optimal(dets, truths, DEFAULT_MIN_INTERSECTION)
            assert len(greedy.matches) <= best
            # For one-sided thresholds of 0.85 coverage the overlap graph is
            # near-bipartite-disjoint; greedy must find at least one match
            # whenever the optimum is positive.
            if best > 0:
                assert len(greedy.matches) >= 1

    def test_parameter_validation(self):
        with pytest.raises(ContractError):
            match_detections([], [], min_intersection=0.0)
        with pytest.raises(ContractError):
            match_detections([], [], min_intersection=1.1)
        with pytest.raises(ContractError):
            GroundTruthRegion(first_frame=10, last_frame=5, box=TRUTH_BOX)


class TestDetectionMetrics:
    def test_hand_case_nine_of_ten(self):
        truths = [truth(box=Box(0, i * 25, 40, 20)) for i in range(10)]
        dets = [Detection(frame=1, box=Box(0, i * 25, 40, 20)) for i in range(9)]
        dets.append(Detection(frame=1, box=Box(200, 200, 10, 10)))
        corr = match_detections(dets, truths)
        recall, precision, false_alarm = detection_metrics(corr)
        assert recall == 0.9
        assert precision == 0.9
        assert false_alarm == pytest.approx(0.1)

    def test_empty_conventions(self):
        corr = match_detections([], [truth()])
        assert detection_metrics(corr) == (0.0, 1.0, 0.0)
        corr = match_detections([Detection(frame=1, box=TRUTH_BOX)], [])
        recall, precision, false_alarm = detection_metrics(corr)
        assert recall == 1.0 and precision == 0.0 and false_alarm == 1.0
        corr = match_detections([], [])
        assert detection_metrics(corr) == (1.0, 1.0, 0.0)

    def test_identities_on_random_tables(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            n_truth = int(rng.integers(0, 6))
            truths = [
                truth(box=Box(0, 30 * i, 25, 20), class_id=None)
                for i in range(n_truth)
            ]
            dets = []
            for i in range(n_truth):
                if rng.random() < 0.7:
                    dets.append(Detection(frame=1, box=Box(0, 30 * i, 25, 20)))
            for _ in range(int(rng.integers(0, 4))):
                dets.append(Detection(frame=1, box=Box(200, 200, 10, 10)))
            corr = match_detections(dets, truths)
            recall, precision, false_alarm = detection_metrics(corr)
            assert 0.0 <= recall <= 1.0
            assert 0.0 <= precision <= 1.0
            assert 0.0 <= false_alarm <= 1.0
            assert precision + false_alarm == pytest.approx(1.0, abs=1e-12)


class TestIdentificationMetrics:
    def test_hand_case_twenty_three_of_twenty_five(self):
        truths = [truth(box=Box(0, 30 * i, 25, 20), class_id="c") for i in range(25)]
        dets = [
            Detection(frame=1, box=Box(0, 30 * i, 25, 20),
                      class_id="c" if i < 23 else "wrong")
            for i in range(25)
        ]
        ident = identification_metrics(dets, truths)
        assert ident.identified == 23 and ident.total == 25
        assert ident.txti == pytest.approx(0.92)
        assert ident.txtni == pytest.approx(0.08)

    def test_null_class_never_identifies(self):
        dets = [Detection(frame=1, box=TRUTH_BOX, class_id=None)]
        ident = identification_metrics(dets, [truth(class_id=None)])
        assert ident.identified == 0 and ident.txti == 0.0

    def test_no_extractions_is_undefined(self):
        ident = identification_metrics([], [truth()])
        assert ident.txti is None and ident.txtni is None
        assert ident.identified == 0 and ident.total == 0

    def test_rates_sum_to_one(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            truths = [
                truth(box=Box(0, 30 * i, 25, 20), class_id="c") for i in range(n)
            ]
            dets = [
                Detection(
                    frame=1,
                    box=Box(0, 30 * i, 25, 20),
                    class_id="c" if rng.random() < 0.6 else "other",
                )
                for i in range(n)
            ]
            ident = identification_metrics(dets, truths)
            assert ident.txti + ident.txtni == pytest.approx(1.0, abs=1e-12)


class TestEvaluateAndReports:
    def test_full_report(self):
        truths = [truth(box=Box(0, 30 * i, 25, 20), class_id="c") for i in range(4)]
        dets = [Detection(frame=1, box=Box(0, 30 * i, 25, 20)) for i in range(3)]
        classified = [
            Detection(frame=1, box=Box(0, 30 * i, 25, 20), class_id="c")
            for i in range(3)
        ]
        report = evaluate(dets, truths, classified=classified)
        assert report.recall == 0.75
        assert report.precision == 1.0
        assert report.false_alarm == 0.0
        assert report.txti == 1.0
        assert report.counts.ground_truth_total == 4
        assert report.counts.detected_total == 3
        assert report.counts.correct == 3 and report.counts.wrong == 0
        assert report.counts.identified == 3

    def test_without_classification_rates_are_none(self):
        report = evaluate([Detection(frame=1, box=TRUTH_BOX)], [truth()])
        assert report.txti is None and report.txtni is None

    def test_report_dict_round_trip(self):
        report = evaluate([Detection(frame=1, box=TRUTH_BOX)], [truth()])
        assert EvalReport.from_dict(report.to_dict()) == report
        with pytest.raises(ValidationError):
            EvalReport.from_dict({"recall": 1.0})


class TestGroundTruthIo:
    def test_save_load_round_trip(self, tmp_path):
        rows = [truth(), truth(first=50, last=80, box=Box(1, 2, 3, 4), class_id=None)]
        path = tmp_path / "truth.json"
        save_ground_truth(path, rows)
        assert load_ground_truth(path) == rows

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputOutputError):
            load_ground_truth(tmp_path / "none.json")

    def test_malformed_rows(self, tmp_path):
        path = tmp_path / "truth.json"
        path.write_text('{"not": "a list"}')
        with pytest.raises(ValidationError, match="JSON list"):
            load_ground_truth(path)
        path.write_text('[{"first_frame": 0}]')
        with pytest.raises(ValidationError, match="malformed ground truth"):
            load_ground_truth(path)
        path.write_text("[whoops")
        with pytest.raises(ValidationError, match="not valid JSON"):
            load_ground_truth(path)

    def test_default_threshold_is_pinned(self):
        assert DEFAULT_MIN_INTERSECTION == 0.85

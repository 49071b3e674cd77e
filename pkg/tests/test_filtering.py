"""Contrast and line-segment-texture filtering of candidate regions."""

import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import hough_bin_matches, hough_oracle_segments
from vidtext.edges import BinaryFrame
from vidtext.errors import ContractError
from vidtext.filtering import (
    FILTER_STAGES,
    FilterVerdict,
    LineSegment,
    Lstf,
    contrast_filter,
    extract_lstf,
    filter_regions,
    histogram_peaks,
    hough_line_segments,
    lstf_filter,
    regularity,
)
from vidtext.frames import GrayFrame
from vidtext.geometry import Box
from vidtext.localize import CandidateRegion


def hist_of(pairs):
    h = [0] * 256
    for level, count in pairs:
        h[level] = count
    return h


def striped_band(w=96, h=32, pitch=10, stroke=5, pad=5):
    """Gray crop imitating overlaid text: dark fill, regular bright strokes."""
    crop = np.zeros((h, w), dtype=np.uint8)
    for x in range(pad, w - pad - stroke + 1, pitch):
        crop[:, x : x + stroke] = 255
    return crop


def stroke_mask(w=60, h=40, xs=(5, 15, 25), height=None):
    mask = np.zeros((h, w), dtype=np.uint8)
    y2 = h if height is None else height
    for x in xs:
        mask[0:y2, x] = 1
    return mask


class TestHistogramPeaks:
    def test_two_far_spikes(self):
        assert histogram_peaks(hist_of([(10, 50), (200, 50)])) == [10, 200]

    def test_three_spikes_keep_top_two_by_count_in_position_order(self):
        h = hist_of([(20, 100), (140, 90), (240, 95)])
        assert histogram_peaks(h) == [20, 240]

    def test_unimodal_yields_single_peak(self):
        assert histogram_peaks(hist_of([(128, 10)])) == [128]

    def test_minimum_separation_suppresses_close_runner_up(self):
        h = hist_of([(100, 50), (104, 45), (200, 30)])
        assert histogram_peaks(h) == [100, 200]

    def test_shoulders_are_not_local_maxima(self):
        # A single hill: only its crest is a candidate peak.
        h = [0] * 256
        for i, c in zip(range(90, 111), range(1, 22)):
            h[i] = c
        for i, c in zip(range(111, 132), range(20, -1, -1)):
            h[i] = c
        assert histogram_peaks(h) == [110]

    def test_validation(self):
        with pytest.raises(ContractError):
            histogram_peaks([0] * 100)
        with pytest.raises(ContractError):
            histogram_peaks([-1] + [0] * 255)
        with pytest.raises(ContractError):
            histogram_peaks([0] * 256, min_separation=0)


class TestContrastFilter:
    def test_high_contrast_passes(self):
        crop = np.zeros((10, 10), dtype=np.uint8)
        crop[:, 5:] = 255
        passed, distance = contrast_filter(crop)
        assert passed and distance == 255

    def test_low_contrast_fails(self):
        crop = np.full((10, 10), 100, dtype=np.uint8)
        crop[:, 5:] = 180
        passed, distance = contrast_filter(crop)
        assert not passed and distance == 80

    def test_uniform_crop_is_degenerate(self):
        assert contrast_filter(np.full((8, 8), 42, dtype=np.uint8)) == (False, 0)

    def test_threshold_is_strict(self):
        crop = np.zeros((4, 222), dtype=np.uint8)
        crop[:, 111:] = 110  # peak distance exactly sigma
        assert contrast_filter(crop, sigma=110) == (False, 110)
        crop[:, 111:] = 111
        assert contrast_filter(crop, sigma=110) == (True, 111)

    def test_shape_validation(self):
        with pytest.raises(ContractError):
            contrast_filter(np.zeros((4, 4, 3), dtype=np.uint8))


class TestHoughSegments:
    def test_single_vertical_stroke(self):
        mask = np.zeros((24, 16), dtype=np.uint8)
        mask[2:22, 7] = 1  # 20 pixels tall
        segments = hough_line_segments(mask)
        assert len(segments) == 1
        seg = segments[0]
        assert abs(seg.theta_deg - 0) <= 1
        assert abs(seg.rho - 7) <= 1
        assert abs(seg.length - 20) <= 1

    def test_three_parallel_strokes(self):
        segments = hough_line_segments(stroke_mask(w=32, h=20))
        assert len(segments) == 3
        thetas = {s.theta_deg for s in segments}
        assert len(thetas) == 1
        rhos = sorted(s.rho for s in segments)
        for got, want in zip(rhos, (5, 15, 25)):
            assert abs(got - want) <= 1

    def test_horizontal_stroke(self):
        mask = np.zeros((16, 30), dtype=np.uint8)
        mask[8, 3:27] = 1
        segments = hough_line_segments(mask)
        assert len(segments) == 1
        assert abs(segments[0].theta_deg - 90) <= 1
        assert abs(segments[0].rho - 8) <= 1

    def test_empty_and_sub_threshold_masks(self):
        assert hough_line_segments(np.zeros((10, 10), dtype=np.uint8)) == []
        mask = np.zeros((10, 10), dtype=np.uint8)
        mask[0:7, 4] = 1  # 7 votes < default vote_min 8
        assert hough_line_segments(mask) == []

    def test_gap_splits_runs(self):
        mask = np.zeros((40, 10), dtype=np.uint8)
        mask[0:12, 5] = 1
        mask[20:32, 5] = 1  # gap of 8 > gap_tol
        segments = hough_line_segments(mask)
        assert len(segments) == 2
        assert all(abs(s.rho - 5) <= 1 for s in segments)

    def test_short_runs_dropped_by_len_min(self):
        mask = np.zeros((40, 10), dtype=np.uint8)
        mask[0:20, 5] = 1
        mask[30:33, 5] = 1  # 3-pixel run, span 2 < len_min 4
        segments = hough_line_segments(mask)
        assert len(segments) == 1

    def test_output_ordering_and_validation(self):
        segments = hough_line_segments(stroke_mask(w=32, h=20))
        assert segments == sorted(
            segments, key=lambda s: (s.theta_deg, s.rho, s.start_t)
        )
        with pytest.raises(ContractError):
            hough_line_segments(np.zeros((4, 4), dtype=np.uint8), vote_min=0)
        with pytest.raises(ContractError):
            hough_line_segments(np.zeros((4, 4), dtype=np.uint8), trace_width=0.1)
        with pytest.raises(ContractError):
            hough_line_segments(np.zeros(4, dtype=np.uint8))

    def test_matches_exhaustive_oracle_within_one_bin(self):
        rng = np.random.default_rng(19)
        stroke_len = 12
        for trial in range(40):
            size = int(rng.integers(20, 33))
            mask = np.zeros((size, size), dtype=np.uint8)
            planted = []
            claimed = []  # inflated stroke boxes kept pairwise disjoint

            def free(box):
                x0, y0, x1, y1 = box
                return all(
                    x1 < cx0 or cx1 < x0 or y1 < cy0 or cy1 < y0
                    for cx0, cy0, cx1, cy1 in claimed
                )

            for _ in range(int(rng.integers(1, 4))):
                for _attempt in range(30):
                    if rng.random() < 0.5:
                        x = int(rng.integers(1, size - 1))
                        y0 = int(rng.integers(0, size - stroke_len))
                        box = (x - 2, y0 - 2, x + 2, y0 + stroke_len + 1)
                        if free(box):
                            mask[y0 : y0 + stroke_len, x] = 1
                            planted.append((0, x))
                            claimed.append(box)
                            break
                    else:
                        y = int(rng.integers(1, size - 1))
                        x0 = int(rng.integers(0, size - stroke_len))
                        box = (x0 - 2, y - 2, x0 + stroke_len + 1, y + 2)
                        if free(box):
                            mask[y, x0 : x0 + stroke_len] = 1
                            planted.append((90, y))
                            claimed.append(box)
                            break
            # Sparse off-stroke noise: too few aligned bits to reach vote_min.
            dropped = 0
            for _ in range(5):
                yy, xx = int(rng.integers(0, size)), int(rng.integers(0, size))
                if free((xx, yy, xx, yy)):
                    mask[yy, xx] = 1
                else:
                    dropped += 1
            impl = hough_line_segments(mask)
            oracle = hough_oracle_segments(mask, vote_min=8, gap_tol=2.0, len_min=4.0)
            for seg in impl:
                assert hough_bin_matches(seg, oracle), (trial, seg)
            # Every planted stroke is recovered.  For a 12-px stroke all theta
            # bins within asin(1/12) ~ 5 degrees of the true orientation can
            # collect the full vote count, so orientation is only determined
            # to that quantization width (rho shifts by at most ~2 bins then).
            for theta, rho in planted:
                assert any(
                    min(abs(s.theta_deg - theta), 180 - abs(s.theta_deg - theta)) <= 6
                    and abs(abs(s.rho) - rho) <= 2
                    for s in impl
                ), (trial, theta, rho, impl)


class TestExtractLstf:
    def seg(self, theta, rho, start=0.0, end=10.0):
        return LineSegment(theta_deg=theta, rho=rho, start_t=start, end_t=end)

    def test_family_vectors(self):
        segments = [self.seg(0, r, start=2.0, end=12.0) for r in (0, 10, 20, 30)]
        feature = extract_lstf(segments)
        assert feature.delta_r == (10, 10, 10)
        assert feature.theta == (0, 0, 0, 0)
        assert feature.r == (10.0, 10.0, 10.0, 10.0)
        assert feature.dist == (0.0, 0.0, 0.0, 0.0)
        assert feature.segment_count == 4

    def test_dist_is_offset_from_earliest_start(self):
        segments = [
            self.seg(0, 0, start=5.0, end=15.0),
            self.seg(0, 10, start=2.0, end=12.0),
        ]
        feature = extract_lstf(segments)
        assert feature.dist == (3.0, 0.0)

    def test_dominant_bin_by_count_with_tie_to_smaller(self):
        segments = [self.seg(90, r) for r in (0, 5, 10, 15, 20)] + [
            self.seg(0, r) for r in (3, 9)
        ]
        feature = extract_lstf(segments)
        assert feature.segment_count == 5
        assert set(feature.theta) == {90}
        tie = [self.seg(40, 0), self.seg(40, 8), self.seg(120, 1), self.seg(120, 7)]
        feature = extract_lstf(tie)
        assert set(feature.theta) == {40}

    def test_family_sorted_by_rho(self):
        segments = [self.seg(0, 30), self.seg(0, 0), self.seg(0, 10)]
        feature = extract_lstf(segments)
        assert feature.delta_r == (10, 20)

    def test_insufficient_segments(self):
        assert extract_lstf([]) is None
        assert extract_lstf([self.seg(0, 5)]) is None
        # Two lone orientations: no family reaches two segments.
        assert extract_lstf([self.seg(0, 5), self.seg(90, 5)]) is None

    def test_exact_types_survive(self):
        segments = [
            LineSegment(theta_deg=0, rho=Fraction(1, 3), start_t=Fraction(0), end_t=Fraction(5)),
            LineSegment(theta_deg=0, rho=Fraction(7, 3), start_t=Fraction(1), end_t=Fraction(6)),
        ]
        feature = extract_lstf(segments)
        assert feature.delta_r == (Fraction(2),)
        assert feature.r == (Fraction(5), Fraction(5))


class TestRegularity:
    def test_equal_gaps_are_exactly_zero(self):
        assert regularity([10, 10, 10]) == 0.0
        rng = np.random.default_rng(3)
        for _ in range(50):
            gap = float(rng.uniform(0.5, 40))
            count = int(rng.integers(1, 12))
            assert regularity([gap] * count) == 0.0

    def test_hand_case_positions_0_5_20_30(self):
        assert regularity([5, 15, 10]) == pytest.approx(1 / 3, abs=1e-12)

    def test_hand_case_positions_0_1_100(self):
        assert regularity([1, 99]) == pytest.approx(0.98, abs=1e-12)

    def test_lstf_argument_uses_its_gaps(self):
        feature = Lstf(delta_r=(5, 15, 10), theta=(0,) * 4, r=(1,) * 4, dist=(0,) * 4)
        assert regularity(feature) == pytest.approx(1 / 3, abs=1e-12)

    def test_translation_and_scaling_invariance(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            gaps = rng.uniform(0.2, 20, int(rng.integers(2, 9))).tolist()
            base = regularity(gaps)
            scale = float(rng.uniform(0.1, 8))
            assert regularity([g * scale for g in gaps]) == pytest.approx(base, abs=1e-12)
            # Translating the underlying positions leaves gaps untouched.
            assert regularity(list(gaps)) == pytest.approx(base, abs=1e-12)

    def test_degenerate_zero_mean_gap_fails(self):
        assert regularity([0, 0, 0]) == math.inf
        assert regularity([0]) == math.inf

    def test_needs_at_least_one_gap(self):
        with pytest.raises(ContractError):
            regularity([])

    def test_printed_variant_shrinks_the_span(self):
        # Mean gap becomes (total - 1) / count instead of total / count.
        gaps = [10, 10, 10]
        printed = regularity(gaps, printed_dbar=True)
        dbar = Fraction(29, 3)
        expected = float(3 * abs(10 - dbar) / (3 * dbar))
        assert printed == pytest.approx(expected, abs=1e-12)


class TestLstfFilter:
    def test_regular_strokes_pass(self):
        mask = stroke_mask(w=60, h=40, xs=(5, 15, 25, 35, 45))
        passed, raw = lstf_filter(mask)
        assert passed and raw == pytest.approx(0.0, abs=1e-9)

    def test_irregular_strokes_fail(self):
        mask = stroke_mask(w=105, h=40, xs=(5, 8, 52, 99))
        passed, raw = lstf_filter(mask)
        assert not passed and raw is not None and raw > 0.2

    def test_blank_mask_fails_without_regularity(self):
        assert lstf_filter(np.zeros((20, 20), dtype=np.uint8)) == (False, None)

    def test_raw_value_above_one_is_clamped_for_threshold(self):
        mask = stroke_mask(w=105, h=40, xs=(5, 6, 99))
        passed, raw = lstf_filter(mask, r_max=1.0)
        if raw is not None and raw > 1.0:
            assert passed  # clamp makes the permissive threshold attainable


class TestFilterRegions:
    def make_frame(self, w=160, h=96):
        pixels = np.full((h, w), 128, dtype=np.uint8)
        band = striped_band(w=96, h=32)
        pixels[32:64, 32:128] = band
        return GrayFrame(index=1, pixels=pixels)

    def region(self, box, index=1):
        return CandidateRegion(frame_index=index, box=box, density=0.4, source_leaves=4)

    def test_text_band_is_accepted_with_box_unchanged(self):
        frame = self.make_frame()
        box = Box(32, 32, 96, 32)
        verdicts = filter_regions([self.region(box)], frame)
        assert len(verdicts) == 1
        v = verdicts[0]
        assert v.accepted and v.rejection_stage is None
        assert v.region.box == box
        assert v.contrast_peak_distance == 255
        assert v.regularity is not None and v.regularity <= 0.2

    def test_rejection_stages(self):
        frame = self.make_frame()
        tiny = self.region(Box(0, 0, 8, 8))
        flat = self.region(Box(0, 0, 32, 24))
        verdicts = filter_regions([tiny, flat], frame)
        assert [v.rejection_stage for v in verdicts] == ["size", "contrast"]
        assert not any(v.accepted for v in verdicts)

    def test_texture_rejection(self):
        rng = np.random.default_rng(55)
        pixels = np.zeros((96, 160), dtype=np.uint8)
        # High contrast speckle: passes contrast, fails stroke regularity.
        speckle = (rng.random((32, 96)) < 0.5).astype(np.uint8) * 255
        pixels[32:64, 32:128] = speckle
        frame = GrayFrame(index=1, pixels=pixels.astype(np.uint8))
        verdicts = filter_regions([self.region(Box(32, 32, 96, 32))], frame)
        assert verdicts[0].rejection_stage in ("lstf", "contrast")

    def test_stage_subset_only_grows_acceptance(self):
        frame = self.make_frame()
        boxes = [Box(0, 0, 8, 8), Box(0, 0, 32, 24), Box(32, 32, 96, 32)]
        regions = [self.region(b) for b in boxes]
        full = filter_regions(regions, frame)
        partial = filter_regions(regions, frame, stages=("size",))
        for f, p in zip(full, partial):
            if f.accepted:
                assert p.accepted

    def test_frame_mismatch_and_bounds_checks(self):
        frame = self.make_frame()
        with pytest.raises(ContractError, match="does not match"):
            filter_regions([self.region(Box(0, 0, 20, 20), index=2)], frame)
        with pytest.raises(ContractError, match="exceeds"):
            filter_regions([self.region(Box(150, 90, 20, 20))], frame)
        with pytest.raises(ContractError, match="unknown filter stages"):
            filter_regions([], frame, stages=("size", "blur"))

    def test_precomputed_edge_mask_matches_derived_one(self):
        from vidtext.edges import binarize, sobel_edge_map

        frame = self.make_frame()
        box = Box(32, 32, 96, 32)
        mask = binarize(sobel_edge_map(frame))
        direct = filter_regions([self.region(box)], frame)
        via_mask = filter_regions([self.region(box)], frame, edge_mask=mask)
        assert direct == via_mask

    def test_stage_names_are_the_documented_set(self):
        assert FILTER_STAGES == ("size", "contrast", "lstf")
